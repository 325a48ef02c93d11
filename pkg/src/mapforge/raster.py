"""Per-class BEV foreground masks from vectorized elements.

Binary pixel-center rasterization: a pixel belongs to a class channel iff
its center lies within line_half_width of an open polyline segment of that
class (capsule test) or inside a closed polygon of that class (even-odd
rule, when fill_polygons). No anti-aliasing; predicates are plain IEEE
expressions so a per-pixel reference loop reproduces the output bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import CLASS_ORDER, ClassLabel, MapElement, PerceptionRange
from .geometry import clip_to_range

FOREGROUND = 255


@dataclass(frozen=True)
class RasterSpec:
    resolution: float = 0.15
    line_half_width: float = 0.5
    fill_polygons: bool = True

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.line_half_width < 0:
            raise ValueError("line_half_width must be non-negative")


def grid_shape(r: PerceptionRange, resolution: float) -> tuple[int, int]:
    """(rows, cols) covering the range; extents must be whole pixels within half a pixel."""
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    h = round(r.y_extent / resolution)
    w = round(r.x_extent / resolution)
    if h < 1 or w < 1:
        raise ValueError("range is smaller than one pixel at this resolution")
    return h, w


@dataclass(frozen=True)
class BevGrid:
    """Class-major stack of binary masks over a perception range.

    data has shape (num classes, height, width), dtype uint8, values in
    {0, 255}; channels follow CLASS_ORDER. Pixel (0, 0) center sits at
    (x_min + res/2, y_max - res/2) and row indices grow toward -y.
    """

    height: int
    width: int
    resolution: float
    range: PerceptionRange
    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if d.shape != (len(CLASS_ORDER), self.height, self.width) or d.dtype != np.uint8:
            raise ValueError("data must be uint8 of shape (num_classes, height, width)")
        if not np.all((d == 0) | (d == FOREGROUND)):
            raise ValueError("mask bytes must be 0 or 255")
        for extent, pixels in ((self.range.x_extent, self.width),
                               (self.range.y_extent, self.height)):
            if abs(pixels * self.resolution - extent) > 0.5 * self.resolution:
                raise ValueError("grid shape does not cover the range within half a pixel")

    def channel(self, label: ClassLabel) -> np.ndarray:
        return self.data[CLASS_ORDER.index(label)]


def world_to_pixel(p, grid: BevGrid):
    """Continuous (row, col) of world (x, y); accepts scalars or arrays."""
    p = np.asarray(p, dtype=np.float64)
    x, y = p[..., 0], p[..., 1]
    row = (grid.range.y_max - y) / grid.resolution - 0.5
    col = (x - grid.range.x_min) / grid.resolution - 0.5
    return row, col


def pixel_to_world(row, col, grid: BevGrid):
    """World (x, y) of continuous (row, col); exact inverse at pixel centers."""
    row = np.asarray(row, dtype=np.float64)
    col = np.asarray(col, dtype=np.float64)
    x = grid.range.x_min + (col + 0.5) * grid.resolution
    y = grid.range.y_max - (row + 0.5) * grid.resolution
    return x, y


def _window(x_lo, x_hi, y_lo, y_hi, r: PerceptionRange, res: float,
            h: int, w: int):
    """Pixel index window generously covering a world-space bbox."""
    c0 = max(0, int(np.floor((x_lo - r.x_min) / res - 0.5)) - 1)
    c1 = min(w, int(np.ceil((x_hi - r.x_min) / res - 0.5)) + 2)
    r0 = max(0, int(np.floor((r.y_max - y_hi) / res - 0.5)) - 1)
    r1 = min(h, int(np.ceil((r.y_max - y_lo) / res - 0.5)) + 2)
    return r0, r1, c0, c1


def _centers(r0, r1, c0, c1, r: PerceptionRange, res: float):
    xs = r.x_min + (np.arange(c0, c1) + 0.5) * res
    ys = r.y_max - (np.arange(r0, r1) + 0.5) * res
    return xs[None, :], ys[:, None]


def _paint_capsule(channel: np.ndarray, a, b, hw: float,
                   r: PerceptionRange, res: float) -> None:
    """Mark pixels whose center is within hw of segment a-b."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    h, w = channel.shape
    r0, r1, c0, c1 = _window(min(ax, bx) - hw, max(ax, bx) + hw,
                             min(ay, by) - hw, max(ay, by) + hw, r, res, h, w)
    if r0 >= r1 or c0 >= c1:
        return
    px, py = _centers(r0, r1, c0, c1, r, res)
    vx, vy = bx - ax, by - ay
    seg2 = vx * vx + vy * vy
    t = np.clip(((px - ax) * vx + (py - ay) * vy) / seg2, 0.0, 1.0)
    dx = px - (ax + t * vx)
    dy = py - (ay + t * vy)
    hit = dx * dx + dy * dy <= hw * hw
    channel[r0:r1, c0:c1][hit] = FOREGROUND


def _paint_polygon(channel: np.ndarray, ring: np.ndarray,
                   r: PerceptionRange, res: float) -> None:
    """Mark pixels whose center is inside the ring (even-odd rule)."""
    h, w = channel.shape
    r0, r1, c0, c1 = _window(ring[:, 0].min(), ring[:, 0].max(),
                             ring[:, 1].min(), ring[:, 1].max(), r, res, h, w)
    if r0 >= r1 or c0 >= c1:
        return
    px, py = _centers(r0, r1, c0, c1, r, res)
    inside = np.zeros(np.broadcast_shapes(px.shape, py.shape), dtype=bool)
    m = len(ring)
    for i in range(m):
        x1, y1 = float(ring[i, 0]), float(ring[i, 1])
        x2, y2 = float(ring[(i + 1) % m, 0]), float(ring[(i + 1) % m, 1])
        if y1 == y2:
            continue
        cond = (y1 > py) != (y2 > py)
        xin = (x2 - x1) * (py - y1) / (y2 - y1) + x1
        inside ^= cond & (px < xin)
    channel[r0:r1, c0:c1][inside] = FOREGROUND


def rasterize_elements(elements, spec: RasterSpec, r: PerceptionRange) -> BevGrid:
    """Rasterize elements (clipped to the range) into per-class masks.

    Open polylines are dilated by spec.line_half_width; closed polygons
    are filled when spec.fill_polygons (and contribute nothing otherwise).
    Pixel-wise OR over elements, so the output is decomposable per element.
    """
    h, w = grid_shape(r, spec.resolution)
    data = np.zeros((len(CLASS_ORDER), h, w), dtype=np.uint8)
    for e in elements:
        channel = data[CLASS_ORDER.index(e.class_label)]
        for piece in clip_to_range(e, r):
            if piece.closed:
                if spec.fill_polygons:
                    _paint_polygon(channel, piece.points, r, spec.resolution)
            else:
                pts = piece.points
                for i in range(len(pts) - 1):
                    _paint_capsule(channel, pts[i], pts[i + 1],
                                   spec.line_half_width, r, spec.resolution)
    return BevGrid(height=h, width=w, resolution=spec.resolution, range=r, data=data)


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection-over-union of two binary masks; 1.0 when both are empty."""
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    fa = a != 0
    fb = b != 0
    union = int(np.logical_or(fa, fb).sum())
    if union == 0:
        return 1.0
    return int(np.logical_and(fa, fb).sum()) / union
