"""Map-element data model: classes, elements, perception range, ego pose."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

MIN_POINT_SEPARATION = 1e-9  # meters; consecutive element points must exceed this


class ClassLabel(enum.Enum):
    PED_CROSSING = "ped_crossing"
    DIVIDER = "divider"
    BOUNDARY = "boundary"
    CENTERLINE = "centerline"


# Fixed channel / class-code order used by rasterization and serialization.
CLASS_ORDER: tuple[ClassLabel, ...] = (
    ClassLabel.PED_CROSSING,
    ClassLabel.DIVIDER,
    ClassLabel.BOUNDARY,
    ClassLabel.CENTERLINE,
)

# Only the polygon class is closed; line classes are open polylines.
CLOSED_CLASSES = frozenset({ClassLabel.PED_CROSSING})


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def as_points(points) -> np.ndarray:
    """Coerce to a float64 (N, 2) array without copying when already one."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"points must have shape (N, 2), got {arr.shape}")
    return arr


@dataclass(frozen=True)
class MapElement:
    """One vectorized road element: an ordered 2D point sequence with a class.

    Closed elements store the vertex loop without duplicating the first
    vertex; the closed flag implies the implicit closing edge.
    """

    class_label: ClassLabel
    points: np.ndarray
    closed: bool

    def __post_init__(self):
        pts = as_points(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("map element needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("map element points must be finite")
        gaps = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
        if np.any(gaps <= MIN_POINT_SEPARATION):
            idx = int(np.argmax(gaps <= MIN_POINT_SEPARATION))
            raise ValueError(f"consecutive points {idx} and {idx + 1} coincide")
        if self.closed != (self.class_label in CLOSED_CLASSES):
            raise ValueError(
                f"{self.class_label.value} must have closed={self.class_label in CLOSED_CLASSES}"
            )

    def with_points(self, points: np.ndarray) -> "MapElement":
        """Same class/closed flag, new geometry."""
        return MapElement(self.class_label, points, self.closed)


def make_element(class_label: ClassLabel, points) -> MapElement:
    """Build an element with the closed flag implied by its class."""
    return MapElement(class_label, points, class_label in CLOSED_CLASSES)


@dataclass(frozen=True)
class PerceptionRange:
    """Ego-centric rectangle (meters): x lateral, y longitudinal."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("perception range must have positive extent")

    @property
    def x_extent(self) -> float:
        return self.x_max - self.x_min

    @property
    def y_extent(self) -> float:
        return self.y_max - self.y_min

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pts = as_points(points)
        return (
            (pts[:, 0] >= self.x_min - tol)
            & (pts[:, 0] <= self.x_max + tol)
            & (pts[:, 1] >= self.y_min - tol)
            & (pts[:, 1] <= self.y_max + tol)
        )


# Base and long-range presets (30x60 m and 60x90 m perception rectangles).
BASE_RANGE = PerceptionRange(-15.0, 15.0, -30.0, 30.0)
LONG_RANGE = PerceptionRange(-30.0, 30.0, -45.0, 45.0)


@dataclass(frozen=True)
class EgoPose:
    """SE(2) pose of the ego vehicle in a world frame."""

    x: float
    y: float
    yaw: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))
