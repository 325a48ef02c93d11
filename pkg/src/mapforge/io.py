"""File formats: scene JSONL, denoise-group JSONL, mask sidecar + raw bytes, reports.

One frame per JSONL line. Floats are serialized with Python's shortest
round-trip repr, so writing the same values always produces the same
bytes and parse -> serialize -> parse is a fixed point.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .denoise import DenoiseGroup
from .elements import CLASS_ORDER, ClassLabel, EgoPose, MapElement, PerceptionRange, make_element
from .evaluation import Prediction
from .matching import Assignment
from .raster import BevGrid


def dumps(obj) -> str:
    """Canonical compact JSON: fixed key order (insertion), no NaN/inf."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def element_to_dict(e: MapElement) -> dict:
    return {
        "class": e.class_label.value,
        "closed": e.closed,
        "points": [[float(x), float(y)] for x, y in e.points],
    }


def element_from_dict(d: dict) -> MapElement:
    try:
        label = ClassLabel(d["class"])
    except ValueError:
        raise ValueError(f"unknown class {d.get('class')!r}") from None
    e = make_element(label, d["points"])
    if "closed" in d and bool(d["closed"]) != e.closed:
        raise ValueError(f"closed flag {d['closed']} contradicts class {label.value!r}")
    return e


def pose_to_dict(p: EgoPose) -> dict:
    return {"x": p.x, "y": p.y, "yaw": p.yaw}


def pose_from_dict(d: dict) -> EgoPose:
    return EgoPose(float(d["x"]), float(d["y"]), float(d["yaw"]))


def prediction_to_dict(p: Prediction) -> dict:
    d = element_to_dict(p.element)
    d["confidence"] = p.confidence
    return d


def prediction_from_dict(d: dict) -> Prediction:
    return Prediction(element=element_from_dict(d), confidence=float(d["confidence"]))


@dataclass(frozen=True)
class SceneRecord:
    """One frame: ids, ego pose, ground-truth elements, optional predictions."""

    scene_id: str
    frame_id: str
    ego_pose: EgoPose
    elements: tuple
    predictions: tuple | None = None

    def __post_init__(self):
        if not self.scene_id or not self.frame_id:
            raise ValueError("scene_id and frame_id must be non-empty")
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.predictions is not None:
            object.__setattr__(self, "predictions", tuple(self.predictions))

    @property
    def key(self) -> tuple[str, str]:
        return (self.scene_id, self.frame_id)


def scene_to_dict(s: SceneRecord) -> dict:
    d = {
        "scene_id": s.scene_id,
        "frame_id": s.frame_id,
        "ego_pose": pose_to_dict(s.ego_pose),
        "elements": [element_to_dict(e) for e in s.elements],
    }
    if s.predictions is not None:
        d["predictions"] = [prediction_to_dict(p) for p in s.predictions]
    return d


def scene_from_dict(d: dict) -> SceneRecord:
    preds = d.get("predictions")
    return SceneRecord(
        scene_id=str(d["scene_id"]),
        frame_id=str(d["frame_id"]),
        ego_pose=pose_from_dict(d["ego_pose"]),
        elements=tuple(element_from_dict(e) for e in d["elements"]),
        predictions=None if preds is None else tuple(prediction_from_dict(p) for p in preds),
    )


def read_jsonl(path) -> list[tuple[int, dict]]:
    """(line number, parsed object) pairs; blank lines are skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append((ln, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {ln}: invalid JSON: {exc}") from None
    return out


def write_jsonl(path, dicts: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for d in dicts:
            fh.write(dumps(d))
            fh.write("\n")


def read_scenes(path) -> list[SceneRecord]:
    scenes = []
    seen = set()
    for ln, obj in read_jsonl(path):
        try:
            scene = scene_from_dict(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: line {ln}: bad scene record: {exc}") from None
        if scene.key in seen:
            raise ValueError(f"{path}: line {ln}: duplicate frame key {scene.key}")
        seen.add(scene.key)
        scenes.append(scene)
    return scenes


def write_scenes(path, scenes: Iterable[SceneRecord]) -> None:
    write_jsonl(path, (scene_to_dict(s) for s in scenes))


def denoise_result_to_dict(scene: SceneRecord, groups: Iterable[DenoiseGroup]) -> dict:
    return {
        "scene_id": scene.scene_id,
        "frame_id": scene.frame_id,
        "groups": [
            {
                "group_index": g.group_index,
                "items": [
                    {
                        "gt_index": it.gt_index,
                        "element": element_to_dict(it.noised),
                        "applied": {
                            "theta": it.applied.theta,
                            "dx": it.applied.dx,
                            "dy": it.applied.dy,
                            "sx": it.applied.sx,
                            "sy": it.applied.sy,
                            "c": it.applied.c,
                            "curvature_applied": it.applied.curvature_applied,
                        },
                    }
                    for it in g.items
                ],
            }
            for g in groups
        ],
    }


def assignment_to_dict(scene: SceneRecord, a: Assignment) -> dict:
    return {
        "scene_id": scene.scene_id,
        "frame_id": scene.frame_id,
        "pairs": [
            {
                "pred_index": p.pred_index,
                "gt_index": p.gt_index,
                "cost": p.cost,
                "point_cost": p.point_cost,
                "best_variant": p.best_variant,
            }
            for p in a.pairs
        ],
        "unmatched_preds": list(a.unmatched_preds),
        "unmatched_gts": list(a.unmatched_gts),
    }


def mask_sidecar_dict(grid: BevGrid) -> dict:
    return {
        "height": grid.height,
        "width": grid.width,
        "resolution": grid.resolution,
        "range": {
            "x_min": grid.range.x_min,
            "x_max": grid.range.x_max,
            "y_min": grid.range.y_min,
            "y_max": grid.range.y_max,
        },
        "classes": [c.value for c in CLASS_ORDER],
    }


def write_mask_files(grid: BevGrid, json_path, bin_path) -> None:
    """Sidecar JSON plus raw class-major, row-major bytes (one per pixel)."""
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(mask_sidecar_dict(grid)))
        fh.write("\n")
    with open(bin_path, "wb") as fh:
        fh.write(np.ascontiguousarray(grid.data).tobytes())


def read_mask_files(json_path, bin_path) -> BevGrid:
    with open(json_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    names = [c.value for c in CLASS_ORDER]
    if meta.get("classes") != names:
        raise ValueError(f"{json_path}: classes must be {names}")
    h, w = int(meta["height"]), int(meta["width"])
    with open(bin_path, "rb") as fh:
        raw = fh.read()
    expected = len(names) * h * w
    if len(raw) != expected:
        raise ValueError(f"{bin_path}: expected {expected} bytes, found {len(raw)}")
    rng = meta["range"]
    prange = PerceptionRange(float(rng["x_min"]), float(rng["x_max"]),
                             float(rng["y_min"]), float(rng["y_max"]))
    data = np.frombuffer(raw, dtype=np.uint8).reshape(len(names), h, w).copy()
    return BevGrid(height=h, width=w, resolution=float(meta["resolution"]),
                   range=prange, data=data)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def mask_paths(out_dir, scene: SceneRecord) -> tuple[str, str]:
    stem = f"{scene.scene_id}_{scene.frame_id}"
    return (os.path.join(out_dir, stem + ".json"),
            os.path.join(out_dir, stem + ".bin"))
