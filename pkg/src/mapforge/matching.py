"""Set matching between predicted and ground-truth elements.

Point-sequence cost is invariant to the representational ambiguity of a
polyline: an open element can be traversed in either direction, a closed
ring additionally from any starting vertex. The assignment step is an
exact Hungarian solve made deterministic by returning the
lexicographically smallest pair list among all minimum-cost assignments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .elements import CLASS_ORDER, ClassLabel, MapElement, as_points
from .geometry import resample_element, resample_polyline


@dataclass(frozen=True)
class CostSpec:
    """Weights for the combined matching cost and the resample count."""

    w_cls: float = 1.0
    w_pts: float = 1.0
    n_points: int = 20

    def __post_init__(self):
        if self.w_cls < 0 or self.w_pts < 0:
            raise ValueError("cost weights must be non-negative")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")


def _variant_stack(gt_samples: np.ndarray, closed: bool) -> tuple[np.ndarray, list[str]]:
    """All point orderings of a resampled element that denote the same geometry."""
    n = len(gt_samples)
    if not closed:
        return np.stack([gt_samples, gt_samples[::-1]]), ["forward", "reversed"]
    idx = (np.arange(n)[None, :] + np.arange(n)[:, None]) % n
    fwd = gt_samples[idx]                     # (n, n, 2), shift k starts at vertex k
    rev = fwd[:, ::-1]
    names = ["forward"] + [f"forward_shift{k}" for k in range(1, n)]
    names += ["reversed"] + [f"reversed_shift{k}" for k in range(1, n)]
    return np.concatenate([fwd, rev]), names


def point_set_cost(pred_pts, gt: MapElement, n: int) -> tuple[float, str]:
    """Mean pointwise L1 distance, minimized over equivalent GT orderings.

    Both inputs are arc-length resampled to n points first; the prediction
    inherits the GT's open/closed convention. Ties prefer the earliest
    variant (forward orders before reversed, smaller shifts first).
    """
    pred = resample_polyline(as_points(pred_pts), n, closed=gt.closed)
    gts = resample_element(gt, n)
    variants, names = _variant_stack(gts, gt.closed)
    costs = np.abs(pred[None, :, :] - variants).sum(axis=2).mean(axis=1)
    best = int(np.argmin(costs))
    return float(costs[best]), names[best]


def _assignment_total(cost: np.ndarray, pairs: Sequence[tuple[int, int]]) -> float:
    # fsum is exactly rounded, so the total does not depend on pair order
    return math.fsum(float(cost[r, c]) for r, c in pairs)


def hungarian(cost) -> list[tuple[int, int]]:
    """Minimum-total-cost assignment on a rectangular matrix.

    Returns min(R, C) disjoint (row, col) pairs sorted by row. Among all
    assignments achieving the minimum total, the lexicographically
    smallest pair list is returned, which pins down ties deterministically.
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError("cost must be a 2-D matrix")
    if c.size and not np.all(np.isfinite(c)):
        raise ValueError("cost entries must be finite")
    n_rows, n_cols = c.shape
    m = min(n_rows, n_cols)
    if m == 0:
        return []

    base_r, base_c = linear_sum_assignment(c)
    best_total = _assignment_total(c, list(zip(base_r, base_c)))

    # Fix pairs left to right: take the smallest (row, col) whose forced
    # inclusion still admits a completion with the optimal total.
    pairs: list[tuple[int, int]] = []
    fixed_costs: list[float] = []
    col_used = np.zeros(n_cols, dtype=bool)
    r_next = 0
    for k in range(m):
        placed = False
        # rows skipped here stay unmatched, so leave enough rows below
        for r in range(r_next, n_rows - (m - k - 1)):
            for ci in np.flatnonzero(~col_used):
                rows_rest = np.arange(r + 1, n_rows)
                cols_rest = np.flatnonzero(~col_used)
                cols_rest = cols_rest[cols_rest != ci]
                entries = fixed_costs + [float(c[r, ci])]
                if m - k - 1 > 0:
                    sub = c[np.ix_(rows_rest, cols_rest)]
                    sr, sc = linear_sum_assignment(sub)
                    entries.extend(float(v) for v in sub[sr, sc])
                if math.fsum(entries) == best_total:
                    pairs.append((int(r), int(ci)))
                    fixed_costs.append(float(c[r, ci]))
                    col_used[ci] = True
                    r_next = r + 1
                    placed = True
                    break
            if placed:
                break
        if not placed:  # pragma: no cover - unreachable for finite inputs
            remaining = sorted((int(r), int(cc)) for r, cc in zip(base_r, base_c)
                               if r >= r_next and not col_used[cc])
            pairs.extend(remaining[: m - k])
            break
    return pairs


@dataclass(frozen=True)
class MatchPair:
    pred_index: int
    gt_index: int
    cost: float
    point_cost: float
    best_variant: str


@dataclass(frozen=True)
class Assignment:
    pairs: tuple[MatchPair, ...]
    unmatched_preds: tuple[int, ...]
    unmatched_gts: tuple[int, ...]


def _class_score(scores, label: ClassLabel) -> float:
    if isinstance(scores, Mapping):
        return float(scores[label])
    arr = np.asarray(scores, dtype=np.float64)
    if arr.shape != (len(CLASS_ORDER),):
        raise ValueError(f"score vector must have length {len(CLASS_ORDER)}")
    return float(arr[CLASS_ORDER.index(label)])


def match_predictions(preds: Sequence[tuple[MapElement, object]],
                      gts: Sequence[MapElement],
                      spec: CostSpec = CostSpec()) -> Assignment:
    """Assign predictions to ground truths by combined class + point cost.

    preds are (element, scores) where scores maps each class label to a
    score (dict keyed by ClassLabel, or a vector over CLASS_ORDER).
    cost[i, j] = -w_cls * score_i[class_j] + w_pts * point_set_cost(i, j).
    """
    n_p, n_g = len(preds), len(gts)
    cost = np.zeros((n_p, n_g))
    pcost = np.zeros((n_p, n_g))
    variants = [["" for _ in range(n_g)] for _ in range(n_p)]
    for i, (elem, scores) in enumerate(preds):
        for j, gt in enumerate(gts):
            pc, var = point_set_cost(elem.points, gt, spec.n_points)
            pcost[i, j] = pc
            variants[i][j] = var
            cost[i, j] = -spec.w_cls * _class_score(scores, gt.class_label) + spec.w_pts * pc

    pairs = hungarian(cost) if n_p and n_g else []
    matched = tuple(MatchPair(i, j, float(cost[i, j]), float(pcost[i, j]), variants[i][j])
                    for i, j in pairs)
    used_p = {i for i, _ in pairs}
    used_g = {j for _, j in pairs}
    return Assignment(
        pairs=matched,
        unmatched_preds=tuple(i for i in range(n_p) if i not in used_p),
        unmatched_gts=tuple(j for j in range(n_g) if j not in used_g),
    )
