"""Chamfer-distance average precision for vectorized map elements.

Predictions and ground truths are compared per class with a symmetric
Chamfer distance on arc-length resampled points. AP follows the
detection-style protocol: rank by confidence, greedily match within each
scene under a distance threshold, integrate the precision envelope over
all recall points. mAP is the arithmetic mean of per-class APs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .elements import CLASS_ORDER, ClassLabel, MapElement
from .geometry import resample_element


@dataclass(frozen=True)
class Prediction:
    """One predicted element with its confidence score."""

    element: MapElement
    confidence: float

    def __post_init__(self):
        c = self.confidence
        if not (isinstance(c, (int, float)) and math.isfinite(c) and 0.0 <= c <= 1.0):
            raise ValueError("confidence must be a finite number in [0, 1]")


@dataclass(frozen=True)
class EvalSpec:
    thresholds: tuple[float, ...] = (0.5, 1.0, 1.5)
    n_points: int = 100
    classes: tuple[ClassLabel, ...] = CLASS_ORDER

    def __post_init__(self):
        ts = tuple(float(t) for t in self.thresholds)
        if not ts:
            raise ValueError("at least one threshold required")
        if any(t <= 0 for t in ts) or any(a >= b for a, b in zip(ts, ts[1:])):
            raise ValueError("thresholds must be positive and strictly increasing")
        object.__setattr__(self, "thresholds", ts)
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        cls = tuple(self.classes)
        if not cls or len(set(cls)) != len(cls):
            raise ValueError("classes must be non-empty and unique")
        object.__setattr__(self, "classes", cls)


def _chamfer_from_samples(pa: np.ndarray, pb: np.ndarray) -> float:
    d = cdist(pa, pb)
    return 0.5 * (float(d.min(axis=1).mean()) + float(d.min(axis=0).mean()))


def chamfer_distance(a: MapElement, b: MapElement, n: int) -> float:
    """Symmetric Chamfer distance between two elements resampled to n points.

    CD = 1/2 * (mean_i min_j ||a_i - b_j|| + mean_j min_i ||b_j - a_i||).
    """
    return _chamfer_from_samples(resample_element(a, n), resample_element(b, n))


def _scenes(preds, gts) -> dict:
    """Normalize (preds, gts) to a shared {scene_key: (pred_list, gt_list)} dict.

    Flat lists are treated as a single scene; Mapping inputs must share keys.
    """
    p_map = isinstance(preds, Mapping)
    g_map = isinstance(gts, Mapping)
    if p_map != g_map:
        raise ValueError("preds and gts must both be per-scene mappings or both flat lists")
    if not p_map:
        return {0: (list(preds), list(gts))}
    if set(preds.keys()) != set(gts.keys()):
        missing = sorted(set(preds.keys()) ^ set(gts.keys()), key=repr)
        raise ValueError(f"scene keys differ between preds and gts: {missing}")
    return {k: (list(preds[k]), list(gts[k])) for k in preds}


def ap_at_threshold(preds, gts, class_label: ClassLabel, tau: float, n: int) -> float:
    """Average precision for one class at Chamfer threshold tau.

    Accepts flat Prediction / MapElement lists (one scene) or per-scene
    mappings evaluated jointly. Predictions are ranked by confidence
    (descending, stable on ties); each is greedily matched to the
    lowest-CD unmatched same-scene GT and counts as a true positive iff
    that CD is strictly below tau. AP integrates the precision envelope
    over all recall points. With zero GTs, AP is 1.0 when there are also
    zero predictions of the class and 0.0 otherwise.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    scenes = _scenes(preds, gts)

    gt_samples: dict = {}
    total_gt = 0
    ranked = []  # (confidence, input order, scene key, resampled pred points)
    order = 0
    for key, (ps, gs) in scenes.items():
        sel = [resample_element(g, n) for g in gs if g.class_label == class_label]
        gt_samples[key] = sel
        total_gt += len(sel)
        for p in ps:
            if p.element.class_label == class_label:
                ranked.append((p.confidence, order, key, resample_element(p.element, n)))
                order += 1
    ranked.sort(key=lambda t: (-t[0], t[1]))

    if total_gt == 0:
        return 1.0 if not ranked else 0.0
    if not ranked:
        return 0.0

    taken = {key: [False] * len(sel) for key, sel in gt_samples.items()}
    tp = np.zeros(len(ranked))
    for k, (_, _, key, samples) in enumerate(ranked):
        best_j, best_cd = -1, math.inf
        for j, gsamp in enumerate(gt_samples[key]):
            if taken[key][j]:
                continue
            cd = _chamfer_from_samples(samples, gsamp)
            if cd < best_cd:  # strict keeps the lowest GT index on ties
                best_cd, best_j = cd, j
        if best_j >= 0 and best_cd < tau:
            taken[key][best_j] = True
            tp[k] = 1.0

    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(1.0 - tp)
    recall = tp_cum / total_gt
    precision = tp_cum / (tp_cum + fp_cum)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    terms = []
    prev_r = 0.0
    for k in range(len(ranked)):
        if tp[k]:
            terms.append((recall[k] - prev_r) * envelope[k])
            prev_r = recall[k]
    return float(math.fsum(terms))


@dataclass(frozen=True)
class ClassResult:
    thresholds: tuple[float, ...]
    ap: tuple[float, ...]
    class_ap: float
    degenerate: bool  # no GTs and no predictions of this class anywhere


@dataclass(frozen=True)
class APReport:
    per_class: dict  # class name -> ClassResult, in spec.classes order
    map_ap: float
    spec: EvalSpec

    def to_json_dict(self) -> dict:
        classes = {}
        for name, res in self.per_class.items():
            entry = {
                "thresholds": list(res.thresholds),
                "ap": list(res.ap),
                "class_ap": res.class_ap,
            }
            if res.degenerate:
                entry["degenerate"] = True
            classes[name] = entry
        return {
            "classes": classes,
            "map": self.map_ap,
            "spec": {
                "thresholds": list(self.spec.thresholds),
                "n_points": self.spec.n_points,
                "classes": [c.value for c in self.spec.classes],
            },
        }


def mean_ap(values: Sequence[float]) -> float:
    """Arithmetic mean used for class AP (over thresholds) and mAP (over classes)."""
    return fmean(values)


def format_ap_percent(x: float) -> str:
    """Render a [0,1] AP or a percent value at result-table precision (1 decimal)."""
    return f"{x:.1f}"


def evaluate(preds, gts, spec: EvalSpec = EvalSpec()) -> APReport:
    """Per-class AP at each threshold, class AP, and their mean (mAP).

    preds / gts follow the ap_at_threshold scene conventions. Any element
    or prediction whose class is outside spec.classes is an error.
    """
    scenes = _scenes(preds, gts)
    allowed = set(spec.classes)
    for key, (ps, gs) in scenes.items():
        for g in gs:
            if g.class_label not in allowed:
                raise ValueError(f"scene {key!r}: GT class {g.class_label.value!r} "
                                 "not in the evaluated class list")
        for p in ps:
            if p.element.class_label not in allowed:
                raise ValueError(f"scene {key!r}: prediction class "
                                 f"{p.element.class_label.value!r} not in the evaluated class list")

    per_class = {}
    class_aps = []
    for cls in spec.classes:
        aps = tuple(ap_at_threshold(preds, gts, cls, t, spec.n_points)
                    for t in spec.thresholds)
        has_any = any(g.class_label == cls for _, gs in scenes.values() for g in gs) or \
                  any(p.element.class_label == cls for ps, _ in scenes.values() for p in ps)
        cap = mean_ap(aps)
        per_class[cls.value] = ClassResult(spec.thresholds, aps, cap, degenerate=not has_any)
        class_aps.append(cap)
    return APReport(per_class=per_class, map_ap=mean_ap(class_aps), spec=spec)
