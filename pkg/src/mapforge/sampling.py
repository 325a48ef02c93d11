"""Decoupled deformable feature aggregation reference kernel.

Projects 3D keypoints into surround-view cameras, samples multi-scale
feature grids bilinearly at the projections plus learned offsets, and
reduces with normalized weights. Classification and regression use
independent sampling sets. Analytic gradients are provided for the full
path so the kernel can be verified against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elements import MapElement
from .geometry import resample_element

MIN_DEPTH = 1e-6


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera: 3x3 intrinsics, 4x4 world-to-camera transform, (W, H) pixels."""

    intrinsics: np.ndarray
    extrinsics: np.ndarray
    image_size: tuple[int, int]

    def __post_init__(self):
        k = np.asarray(self.intrinsics, dtype=np.float64)
        e = np.asarray(self.extrinsics, dtype=np.float64)
        if k.shape != (3, 3) or e.shape != (4, 4):
            raise ValueError("intrinsics must be 3x3 and extrinsics 4x4")
        if k[0, 0] <= 0 or k[1, 1] <= 0:
            raise ValueError("focal lengths must be positive")
        rot = e[:3, :3]
        if np.abs(rot @ rot.T - np.eye(3)).max() > 1e-9:
            raise ValueError("extrinsics rotation block must be orthonormal")
        if np.abs(e[3] - np.array([0.0, 0.0, 0.0, 1.0])).max() > 0:
            raise ValueError("extrinsics last row must be [0, 0, 0, 1]")
        w, h = self.image_size
        if int(w) <= 0 or int(h) <= 0:
            raise ValueError("image_size must be positive")
        object.__setattr__(self, "intrinsics", k)
        object.__setattr__(self, "extrinsics", e)
        object.__setattr__(self, "image_size", (int(w), int(h)))


@dataclass(frozen=True)
class FeaturePyramid:
    """Multi-scale feature grids for one view: levels (H, W, C), strides increasing."""

    levels: tuple
    strides: tuple

    def __post_init__(self):
        levels = tuple(np.asarray(l, dtype=np.float64) for l in self.levels)
        strides = tuple(float(s) for s in self.strides)
        if not levels or len(levels) != len(strides):
            raise ValueError("levels and strides must be non-empty and equal length")
        c = levels[0].shape[-1] if levels[0].ndim == 3 else -1
        for grid in levels:
            if grid.ndim != 3 or grid.shape[-1] != c:
                raise ValueError("each level must be (height, width, channels) with equal channels")
        if any(s <= 0 for s in strides) or any(a >= b for a, b in zip(strides, strides[1:])):
            raise ValueError("strides must be positive and strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "strides", strides)

    @property
    def channels(self) -> int:
        return self.levels[0].shape[-1]


@dataclass(frozen=True)
class SamplePointSet:
    """Keypoints (K, 3) with per-(keypoint, view, level) offsets and weights.

    Offsets are in normalized image coordinates. Weights are nonnegative
    with positive total; the canonical form sums to 1, but aggregation
    renormalizes over the valid subset, so any positive scaling of the
    weights produces identical output.
    """

    keypoints: np.ndarray
    offsets: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        kp = np.asarray(self.keypoints, dtype=np.float64)
        off = np.asarray(self.offsets, dtype=np.float64)
        wgt = np.asarray(self.weights, dtype=np.float64)
        if kp.ndim != 2 or kp.shape[1] != 3:
            raise ValueError("keypoints must have shape (K, 3)")
        if off.ndim != 4 or off.shape[0] != kp.shape[0] or off.shape[3] != 2:
            raise ValueError("offsets must have shape (K, views, levels, 2)")
        if wgt.shape != off.shape[:3]:
            raise ValueError("weights must have shape (K, views, levels)")
        if not (np.all(np.isfinite(kp)) and np.all(np.isfinite(off)) and np.all(np.isfinite(wgt))):
            raise ValueError("keypoints, offsets and weights must be finite")
        if np.any(wgt < 0):
            raise ValueError("weights must be non-negative")
        if math.fsum(wgt.ravel().tolist()) <= 0.0:
            raise ValueError("weights must have positive total")
        object.__setattr__(self, "keypoints", kp)
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "weights", wgt)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.weights.shape


@dataclass(frozen=True)
class AggregatedFeature:
    vector: np.ndarray     # (channels,)
    validity: np.ndarray   # (keypoints, views) bool


def keypoints_from_element(e: MapElement, n: int, z: float = 0.0) -> np.ndarray:
    """Element resampled to n points and lifted to constant height z."""
    pts = resample_element(e, n)
    return np.column_stack([pts, np.full(len(pts), float(z))])


def project_point(p3, cam: CameraModel) -> tuple[float, float, bool]:
    """Normalized image coordinates of a world point; valid iff in front and on-image.

    A point is valid when its camera depth exceeds 1e-6 m and the pixel
    falls inside [0, W] x [0, H]. Behind-camera points return (0, 0, False);
    off-image ones return their computed coordinates with valid = False.
    """
    p3 = np.asarray(p3, dtype=np.float64)
    q = cam.extrinsics[:3, :3] @ p3 + cam.extrinsics[:3, 3]
    if q[2] <= MIN_DEPTH:
        return 0.0, 0.0, False
    k = cam.intrinsics
    px = k[0, 0] * q[0] / q[2] + k[0, 2]
    py = k[1, 1] * q[1] / q[2] + k[1, 2]
    w, h = cam.image_size
    u = px / w
    v = py / h
    valid = bool(0.0 <= px <= w and 0.0 <= py <= h)
    return float(u), float(v), valid


def unproject_pixel(u: float, v: float, depth: float, cam: CameraModel) -> np.ndarray:
    """World point projecting to normalized (u, v) at the given camera depth."""
    if depth <= 0:
        raise ValueError("depth must be positive")
    w, h = cam.image_size
    k = cam.intrinsics
    x = (u * w - k[0, 2]) / k[0, 0] * depth
    y = (v * h - k[1, 2]) / k[1, 1] * depth
    q = np.array([x, y, depth])
    rot = cam.extrinsics[:3, :3]
    return rot.T @ (q - cam.extrinsics[:3, 3])


def _stencil(level: np.ndarray, u: float, v: float):
    """Corner indices and weights of the align-corners-false bilinear stencil."""
    h, w, _ = level.shape
    gx = u * w - 0.5
    gy = v * h - 0.5
    x0 = math.floor(gx)
    y0 = math.floor(gy)
    fx = gx - x0
    fy = gy - y0
    corners = (
        (y0, x0, (1.0 - fx) * (1.0 - fy)),
        (y0, x0 + 1, fx * (1.0 - fy)),
        (y0 + 1, x0, (1.0 - fx) * fy),
        (y0 + 1, x0 + 1, fx * fy),
    )
    return corners, fx, fy


def _corner_value(level: np.ndarray, y: int, x: int) -> np.ndarray:
    h, w, c = level.shape
    if 0 <= y < h and 0 <= x < w:
        return level[y, x]
    return np.zeros(c)


def bilinear_sample(level, u: float, v: float) -> np.ndarray:
    """Bilinear read of an (H, W, C) grid at normalized (u, v).

    align-corners-false: grid coords are (u*W - 0.5, v*H - 0.5); neighbors
    outside the grid contribute zero.
    """
    level = np.asarray(level, dtype=np.float64)
    corners, _, _ = _stencil(level, u, v)
    acc = np.zeros(level.shape[-1])
    for y, x, wgt in corners:
        acc += wgt * _corner_value(level, y, x)
    return acc


def bilinear_sample_grad(level, u: float, v: float):
    """Analytic partials of bilinear_sample.

    Returns (d_du, d_dv, corners): channel vectors d value / du and
    d value / dv, plus the in-bounds stencil entries as (y, x, weight)
    where weight is d value / d cell value, identical for every channel.
    """
    level = np.asarray(level, dtype=np.float64)
    h, w, _ = level.shape
    corners, fx, fy = _stencil(level, u, v)
    y0, x0, _ = corners[0]
    f00 = _corner_value(level, y0, x0)
    f01 = _corner_value(level, y0, x0 + 1)
    f10 = _corner_value(level, y0 + 1, x0)
    f11 = _corner_value(level, y0 + 1, x0 + 1)
    d_dgx = (f01 - f00) * (1.0 - fy) + (f11 - f10) * fy
    d_dgy = (f10 - f00) * (1.0 - fx) + (f11 - f01) * fx
    in_bounds = tuple((y, x, wgt) for y, x, wgt in corners if 0 <= y < h and 0 <= x < w)
    return d_dgx * w, d_dgy * h, in_bounds


def _check_setup(pyramids, cams, sp: SamplePointSet) -> int:
    if len(pyramids) != len(cams):
        raise ValueError("one pyramid per camera required")
    k, v, l = sp.shape
    if v != len(cams):
        raise ValueError(f"sample set expects {v} views, got {len(cams)} cameras")
    channels = pyramids[0].channels if pyramids else 0
    for p in pyramids:
        if p.channels != channels:
            raise ValueError("channel counts differ across views")
        if len(p.levels) != l:
            raise ValueError(f"sample set expects {l} levels per view")
    return channels


def _projections(cams, sp: SamplePointSet):
    k, v, _ = sp.shape
    uv = np.zeros((k, v, 2))
    valid = np.zeros((k, v), dtype=bool)
    for ki in range(k):
        for vi in range(v):
            u, vv, ok = project_point(sp.keypoints[ki], cams[vi])
            uv[ki, vi] = (u, vv)
            valid[ki, vi] = ok
    return uv, valid


def _valid_weight_sum(sp: SamplePointSet, valid: np.ndarray) -> float:
    return math.fsum(sp.weights[valid, :].ravel().tolist())


def aggregate(pyramids, cams, sp: SamplePointSet) -> AggregatedFeature:
    """Weighted sum of bilinear samples at projected keypoints plus offsets.

    Weights are renormalized over the valid (keypoint, view, level) triples
    so the output keeps unit weight mass when some projections miss; if
    nothing is valid (or valid weight mass is zero) the output is the zero
    vector and the validity mask reports which projections failed.
    Reduction runs in (keypoint, view, level) index order.
    """
    channels = _check_setup(pyramids, cams, sp)
    uv, valid = _projections(cams, sp)
    k, v, l = sp.shape
    wsum = _valid_weight_sum(sp, valid)
    out = np.zeros(channels)
    if wsum <= 0.0:
        return AggregatedFeature(vector=out, validity=valid)
    for ki in range(k):
        for vi in range(v):
            if not valid[ki, vi]:
                continue
            for li in range(l):
                wgt = sp.weights[ki, vi, li] / wsum
                su = uv[ki, vi, 0] + sp.offsets[ki, vi, li, 0]
                sv = uv[ki, vi, 1] + sp.offsets[ki, vi, li, 1]
                out += wgt * bilinear_sample(pyramids[vi].levels[li], su, sv)
    return AggregatedFeature(vector=out, validity=valid)


def aggregate_with_grad(pyramids, cams, sp: SamplePointSet):
    """aggregate() plus analytic derivatives of the output.

    Returns (feature, d_offsets, d_features): d_offsets has shape
    (K, V, L, 2, C) with the partials of each output channel w.r.t. each
    offset component; d_features[view][level] is an (H, W) coefficient
    grid - the derivative of any output channel w.r.t. that cell's value
    in the same channel (cross-channel partials are zero).
    """
    channels = _check_setup(pyramids, cams, sp)
    uv, valid = _projections(cams, sp)
    k, v, l = sp.shape
    d_off = np.zeros((k, v, l, 2, channels))
    d_feat = [[np.zeros(lev.shape[:2]) for lev in p.levels] for p in pyramids]
    out = np.zeros(channels)
    wsum = _valid_weight_sum(sp, valid)
    if wsum <= 0.0:
        return AggregatedFeature(vector=out, validity=valid), d_off, d_feat
    for ki in range(k):
        for vi in range(v):
            if not valid[ki, vi]:
                continue
            for li in range(l):
                wgt = sp.weights[ki, vi, li] / wsum
                level = pyramids[vi].levels[li]
                su = uv[ki, vi, 0] + sp.offsets[ki, vi, li, 0]
                sv = uv[ki, vi, 1] + sp.offsets[ki, vi, li, 1]
                out += wgt * bilinear_sample(level, su, sv)
                d_du, d_dv, corners = bilinear_sample_grad(level, su, sv)
                d_off[ki, vi, li, 0] = wgt * d_du
                d_off[ki, vi, li, 1] = wgt * d_dv
                for y, x, cw in corners:
                    d_feat[vi][li][y, x] += wgt * cw
    return AggregatedFeature(vector=out, validity=valid), d_off, d_feat


def decoupled_aggregate(pyramids, cams, cls_sp: SamplePointSet,
                        reg_sp: SamplePointSet) -> tuple[AggregatedFeature, AggregatedFeature]:
    """Independent aggregation for classification and regression branches.

    Nothing is shared between the two sample sets, so each branch's output
    depends only on its own offsets and weights.
    """
    return aggregate(pyramids, cams, cls_sp), aggregate(pyramids, cams, reg_sp)
