"""Physical-prior noise for ground-truth map elements.

Four noise families with geometric meaning for road elements: rotation
about the element anchor, shared x/y translation, anisotropic scaling
about the anchor, and a multiplicative perturbation of the discrete
turning angles (curvature). No categorical noise: class labels never
change. All sampling is deterministic given (element order, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elements import MapElement
from .geometry import anchor_point, wrap_angles
from .rng import Stream


@dataclass(frozen=True)
class NoiseSpec:
    """Sampling ranges for the four noise families plus group count and seed.

    rot_max is in radians (theta ~ U[-rot_max, rot_max]); trans_max in
    meters (dx, dy each U[-trans_max, trans_max]); scale and curvature
    factors are unitless uniform ranges.
    """

    rot_max: float = math.radians(15.0)
    trans_max: float = 1.0
    scale_min: float = 0.9
    scale_max: float = 1.1
    curv_min: float = 0.9
    curv_max: float = 1.1
    groups: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.rot_max < 0 or self.trans_max < 0:
            raise ValueError("noise magnitudes must be non-negative")
        if not (0 < self.scale_min <= self.scale_max):
            raise ValueError("scale range must satisfy 0 < min <= max")
        if not (0 < self.curv_min <= self.curv_max):
            raise ValueError("curvature range must satisfy 0 < min <= max")
        if self.groups < 0:
            raise ValueError("groups must be >= 0")


@dataclass(frozen=True)
class AppliedNoise:
    """The sampled parameters recorded alongside each noised element."""

    theta: float
    dx: float
    dy: float
    sx: float
    sy: float
    c: float
    curvature_applied: bool


@dataclass(frozen=True)
class NoisedItem:
    gt_index: int
    noised: MapElement
    applied: AppliedNoise


@dataclass(frozen=True)
class DenoiseGroup:
    group_index: int
    items: tuple[NoisedItem, ...]


def apply_rotation_noise(e: MapElement, theta: float) -> MapElement:
    """Rotate every point by theta about the element anchor."""
    a = anchor_point(e)
    ct, st = math.cos(theta), math.sin(theta)
    rel = e.points - a
    rotated = np.column_stack([ct * rel[:, 0] - st * rel[:, 1],
                               st * rel[:, 0] + ct * rel[:, 1]])
    return e.with_points(a + rotated)


def apply_location_noise(e: MapElement, dx: float, dy: float) -> MapElement:
    """Translate every point by the same (dx, dy)."""
    return e.with_points(e.points + np.array([dx, dy]))


def apply_scale_noise(e: MapElement, sx: float, sy: float) -> MapElement:
    """Scale anchor-relative coordinates by (sx, sy); the anchor stays fixed."""
    if sx <= 0 or sy <= 0:
        raise ValueError("scale factors must be positive")
    a = anchor_point(e)
    rel = e.points - a
    return e.with_points(a + rel * np.array([sx, sy]))


def apply_curvature_noise(e: MapElement, c: float) -> MapElement:
    """Scale the discrete turning angles by c and rebuild by dead reckoning.

    Segment headings h_i and turns are taken with the curvature_profile
    conventions; the new polyline starts at p0 with the original first
    heading and original segment lengths, so lengths are preserved exactly
    and c = 1 reproduces the input.
    """
    if e.closed:
        raise ValueError("curvature noise is defined for open polylines only")
    pts = e.points
    if len(pts) < 3:
        raise ValueError("curvature noise needs at least 3 points")
    seg = np.diff(pts, axis=0)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    headings = np.arctan2(seg[:, 1], seg[:, 0])
    turns = wrap_angles(headings[1:] - headings[:-1])
    new_headings = headings[0] + np.concatenate([[0.0], np.cumsum(c * turns)])
    deltas = lengths[:, None] * np.column_stack([np.cos(new_headings),
                                                 np.sin(new_headings)])
    out = np.empty_like(pts)
    out[0] = pts[0]
    out[1:] = pts[0] + np.cumsum(deltas, axis=0)
    return e.with_points(out)


def curvature_noise_applies(e: MapElement) -> bool:
    """Curvature noise targets open line-shaped elements with >= 3 points."""
    return not e.closed and len(e.points) >= 3


def noise_element(e: MapElement, stream: Stream, spec: NoiseSpec) -> tuple[MapElement, AppliedNoise]:
    """Sample one parameter set and apply rotation -> scale -> curvature -> location.

    All six parameters are always drawn (in the documented order theta, dx,
    dy, sx, sy, c) so the stream layout does not depend on element shape;
    curvature is skipped for closed or 2-point elements.
    """
    theta = stream.uniform(-spec.rot_max, spec.rot_max)
    dx = stream.uniform(-spec.trans_max, spec.trans_max)
    dy = stream.uniform(-spec.trans_max, spec.trans_max)
    sx = stream.uniform(spec.scale_min, spec.scale_max)
    sy = stream.uniform(spec.scale_min, spec.scale_max)
    c = stream.uniform(spec.curv_min, spec.curv_max)

    noised = apply_rotation_noise(e, theta)
    noised = apply_scale_noise(noised, sx, sy)
    use_curv = curvature_noise_applies(e)
    if use_curv:
        noised = apply_curvature_noise(noised, c)
    noised = apply_location_noise(noised, dx, dy)
    return noised, AppliedNoise(theta, dx, dy, sx, sy, c, use_curv)


def generate_denoise_groups(gts: list[MapElement], spec: NoiseSpec) -> list[DenoiseGroup]:
    """Build spec.groups noised copies of the ground-truth set.

    Each (group, element) pair derives its own RNG stream from
    (spec.seed, group_index, element_index), so the output is a pure
    function of (gts order, spec) and is identical under any parallel
    evaluation order.
    """
    groups = []
    for g in range(spec.groups):
        items = []
        for i, e in enumerate(gts):
            noised, applied = noise_element(e, Stream(spec.seed, g, i), spec)
            items.append(NoisedItem(gt_index=i, noised=noised, applied=applied))
        groups.append(DenoiseGroup(group_index=g, items=tuple(items)))
    return groups
