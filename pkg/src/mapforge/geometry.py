"""Polyline geometry: resampling, curvature, frame transforms, clipping."""

from __future__ import annotations

import math

import numpy as np

from .elements import EgoPose, MapElement, PerceptionRange, as_points

DEGENERATE_LENGTH = 1e-9  # meters; shorter polylines cannot be resampled
MIN_PIECE_LENGTH = 1e-6  # meters; clip output pieces below this are dropped

_TWO_PI = 2.0 * math.pi


def wrap_angles(angles) -> np.ndarray:
    """Wrap angles to (-pi, pi]. Exact (bitwise identity) for |a| <= pi."""
    a = np.asarray(angles, dtype=np.float64)
    wrapped = a - _TWO_PI * np.round(a / _TWO_PI)
    return np.where(wrapped <= -math.pi, wrapped + _TWO_PI, wrapped)


def polyline_length(points, closed: bool = False) -> float:
    """Total arc length, including the implicit closing edge when closed."""
    pts = as_points(points)
    path = np.vstack([pts, pts[:1]]) if closed else pts
    return float(np.hypot(np.diff(path[:, 0]), np.diff(path[:, 1])).sum())


def resample_polyline(points, n: int, closed: bool = False) -> np.ndarray:
    """Resample a polyline to n points uniformly spaced in arc length.

    Open polylines keep their endpoints and use spacing L/(n-1). Closed
    loops are traversed once starting at point 0 with spacing L/n and no
    duplicated endpoint, so the wrap gap is uniform too.

    Targets that land on an input vertex (within 1e-12 of the total
    length) return that vertex bitwise, so a uniformly spaced input with
    n = len(points) resamples to itself exactly (and its reversals and,
    when closed, rotations do too). Samples in the interior of a segment
    carry ordinary rounding, so they are direction-stable only to fp noise.
    """
    pts = as_points(points)
    if len(pts) < 2:
        raise ValueError("need at least 2 points to resample")
    if n < 2:
        raise ValueError("resample count must be >= 2")
    path = np.vstack([pts, pts[:1]]) if closed else pts
    seg = np.diff(path, axis=0)
    lens = np.hypot(seg[:, 0], seg[:, 1])
    arc = np.concatenate([[0.0], np.cumsum(lens)])
    total = math.fsum(lens.tolist())  # exactly rounded: same forward and reversed
    if total < DEGENERATE_LENGTH:
        raise ValueError("degenerate polyline: total length < 1e-9 m")
    if closed:
        targets = np.arange(n) * (total / n)
    else:
        targets = np.linspace(0.0, total, n)
    idx = np.searchsorted(arc, targets, side="right") - 1
    idx = np.clip(idx, 0, len(arc) - 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (targets - arc[idx]) / lens[idx]
    out = path[idx] + t[:, None] * (path[idx + 1] - path[idx])
    # vertex snap; tolerance stays below half the minimum point separation
    tol = min(1e-12 * total, 2.5e-10)
    snap_lo = np.abs(targets - arc[idx]) <= tol
    snap_hi = np.abs(arc[idx + 1] - targets) <= tol
    out[snap_lo] = path[idx[snap_lo]]
    out[snap_hi] = path[idx[snap_hi] + 1]
    out[0] = pts[0]
    if not closed:
        out[-1] = pts[-1]
    return out


def resample_element(e: MapElement, n: int) -> np.ndarray:
    """Element-aware resampling (closed elements sampled around the loop)."""
    return resample_polyline(e.points, n, closed=e.closed)


def anchor_point(e: MapElement) -> np.ndarray:
    """Arithmetic mean of the stored vertices (loop vertices not duplicated)."""
    return e.points.mean(axis=0)


def segment_headings(points) -> np.ndarray:
    """Heading (atan2) of each segment p[i] -> p[i+1]."""
    pts = as_points(points)
    seg = np.diff(pts, axis=0)
    return np.arctan2(seg[:, 1], seg[:, 0])


def curvature_profile(points) -> np.ndarray:
    """Discrete curvature at interior vertices of an open polyline.

    The tangent at interior vertex i is the heading of the outgoing segment
    (p[i+1] - p[i]); curvature is the wrapped heading difference divided by
    that segment's length. Returns len(points) - 2 values (1/m).
    """
    pts = as_points(points)
    if len(pts) < 3:
        raise ValueError("curvature needs at least 3 points")
    seg = np.diff(pts, axis=0)
    headings = np.arctan2(seg[:, 1], seg[:, 0])
    turns = wrap_angles(headings[1:] - headings[:-1])
    out_len = np.hypot(seg[1:, 0], seg[1:, 1])
    return turns / out_len


def transform_to_frame(e: MapElement, frame_from: EgoPose, frame_to: EgoPose) -> MapElement:
    """Re-express an element given in `frame_from` in `frame_to` coordinates."""
    pts = e.points
    cf, sf = math.cos(frame_from.yaw), math.sin(frame_from.yaw)
    wx = frame_from.x + cf * pts[:, 0] - sf * pts[:, 1]
    wy = frame_from.y + sf * pts[:, 0] + cf * pts[:, 1]
    ct, st = math.cos(frame_to.yaw), math.sin(frame_to.yaw)
    dx = wx - frame_to.x
    dy = wy - frame_to.y
    local = np.column_stack([ct * dx + st * dy, -st * dx + ct * dy])
    return e.with_points(local)


def _clip_segment(p, q, r: PerceptionRange):
    """Liang-Barsky clip of segment p->q against the range rectangle.

    Returns (a, b) endpoints of the in-range part, or None. Endpoints that
    were already in range are passed through bitwise so consecutive clipped
    segments stitch exactly.
    """
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    t0, t1 = 0.0, 1.0
    for den, num in (
        (-dx, p[0] - r.x_min),
        (dx, r.x_max - p[0]),
        (-dy, p[1] - r.y_min),
        (dy, r.y_max - p[1]),
    ):
        if den == 0.0:
            if num < 0.0:
                return None
        else:
            t = num / den
            if den < 0.0:
                if t > t0:
                    t0 = t
            else:
                if t < t1:
                    t1 = t
    if t0 > t1:
        return None
    a = p if t0 == 0.0 else np.array([p[0] + t0 * dx, p[1] + t0 * dy])
    b = q if t1 == 1.0 else np.array([p[0] + t1 * dx, p[1] + t1 * dy])
    return a, b


def _dedupe(points: list, closed: bool) -> np.ndarray:
    """Drop consecutive points closer than the element separation threshold."""
    kept = [points[0]]
    for pt in points[1:]:
        if math.hypot(pt[0] - kept[-1][0], pt[1] - kept[-1][1]) > 1e-9:
            kept.append(pt)
    if closed and len(kept) > 1:
        if math.hypot(kept[0][0] - kept[-1][0], kept[0][1] - kept[-1][1]) <= 1e-9:
            kept.pop()
    return np.asarray(kept, dtype=np.float64)


def _clip_open(e: MapElement, r: PerceptionRange) -> list[MapElement]:
    pieces: list[list] = []
    current: list = []
    pts = e.points
    for i in range(len(pts) - 1):
        res = _clip_segment(pts[i], pts[i + 1], r)
        if res is None:
            if current:
                pieces.append(current)
                current = []
            continue
        a, b = res
        if current and a[0] == current[-1][0] and a[1] == current[-1][1]:
            current.append(b)
        else:
            if current:
                pieces.append(current)
            current = [a, b]
    if current:
        pieces.append(current)

    out = []
    for piece in pieces:
        arr = _dedupe(piece, closed=False)
        if len(arr) >= 2 and polyline_length(arr) >= MIN_PIECE_LENGTH:
            out.append(e.with_points(arr))
    return out


def _clip_polygon(e: MapElement, r: PerceptionRange) -> list[MapElement]:
    # Sutherland-Hodgman against the four half-planes of the rectangle.
    planes = (
        (0, r.x_min, +1.0),
        (0, r.x_max, -1.0),
        (1, r.y_min, +1.0),
        (1, r.y_max, -1.0),
    )
    poly = [np.asarray(p, dtype=np.float64) for p in e.points]
    for axis, bound, sign in planes:
        if len(poly) < 3:
            return []
        clipped = []
        for i, cur in enumerate(poly):
            prev = poly[i - 1]
            cur_in = sign * (cur[axis] - bound) >= 0.0
            prev_in = sign * (prev[axis] - bound) >= 0.0
            if cur_in != prev_in:
                t = (bound - prev[axis]) / (cur[axis] - prev[axis])
                clipped.append(prev + t * (cur - prev))
            if cur_in:
                clipped.append(cur)
        poly = clipped
    if len(poly) < 3:
        return []
    arr = _dedupe([tuple(p) for p in poly], closed=True)
    if len(arr) < 3 or polyline_length(arr, closed=True) < MIN_PIECE_LENGTH:
        return []
    return [e.with_points(arr)]


def clip_to_range(e: MapElement, r: PerceptionRange) -> list[MapElement]:
    """Clip an element to the perception rectangle.

    Open polylines split into maximal in-range pieces with boundary
    intersection points appended; closed polygons clip to the rectangle.
    Pieces with fewer than 2 points or length below 1e-6 m are dropped.
    """
    if e.closed:
        return _clip_polygon(e, r)
    return _clip_open(e, r)


def normalize_points(e: MapElement, r: PerceptionRange) -> np.ndarray:
    """Affine map of element points to the unit square; errors if out of range."""
    pts = e.points
    ok = r.contains(pts, tol=1e-6)
    if not np.all(ok):
        idx = int(np.argmin(ok))
        raise ValueError(f"point {idx} is outside the perception range")
    return np.column_stack([
        (pts[:, 0] - r.x_min) / r.x_extent,
        (pts[:, 1] - r.y_min) / r.y_extent,
    ])


def denormalize_points(points01, r: PerceptionRange) -> np.ndarray:
    """Inverse of normalize_points."""
    pts = as_points(points01)
    return np.column_stack([
        r.x_min + pts[:, 0] * r.x_extent,
        r.y_min + pts[:, 1] * r.y_extent,
    ])
