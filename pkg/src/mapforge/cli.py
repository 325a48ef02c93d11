"""mapforge command line: batch noise generation, rasterization, matching, eval.

Frames are processed in a thread pool sized by MAPFORGE_THREADS (default:
CPU count); every frame computation is a pure function, and outputs are
always written in input order, so file contents are identical for any
thread count. Exit code is 0 iff the command completed without error.
"""

from __future__ import annotations

import argparse
import math
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io
from .denoise import NoiseSpec, generate_denoise_groups
from .elements import CLASS_ORDER, ClassLabel, MapElement, PerceptionRange, make_element
from .evaluation import EvalSpec, evaluate, format_ap_percent
from .matching import CostSpec, match_predictions
from .raster import RasterSpec, rasterize_elements
from .rng import Stream
from .sampling import (CameraModel, FeaturePyramid, SamplePointSet,
                       decoupled_aggregate, keypoints_from_element)

THREADS_ENV = "MAPFORGE_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


def map_frames(fn, items):
    """Apply fn to every frame; results come back in input order."""
    items = list(items)
    n = min(thread_count(), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise ValueError(f"cannot parse {what} from {text!r}") from None


def _parse_range(text: str) -> PerceptionRange:
    vals = _parse_floats(text, "range")
    if len(vals) != 4:
        raise ValueError(f"range must be x_min,x_max,y_min,y_max, got {text!r}")
    return PerceptionRange(*vals)


def _parse_classes(text: str) -> tuple[ClassLabel, ...]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(ClassLabel(n) for n in names)


def _scores_for(element: MapElement, confidence: float) -> dict:
    # score mass on the predicted class only; other classes score 0
    return {label: (confidence if label is element.class_label else 0.0)
            for label in CLASS_ORDER}


def _cmd_gen_noise(args) -> int:
    spec = NoiseSpec(
        rot_max=math.radians(args.rot_max_deg),
        trans_max=args.trans_max,
        scale_min=args.scale_min,
        scale_max=args.scale_max,
        curv_min=args.curv_min,
        curv_max=args.curv_max,
        groups=args.groups,
        seed=args.seed,
    )
    scenes = io.read_scenes(args.input)

    def work(scene):
        groups = generate_denoise_groups(list(scene.elements), spec)
        return io.denoise_result_to_dict(scene, groups)

    io.write_jsonl(args.output, map_frames(work, scenes))
    return 0


def _cmd_rasterize(args) -> int:
    prange = _parse_range(args.range)
    spec = RasterSpec(resolution=args.resolution, line_half_width=args.half_width)
    scenes = io.read_scenes(args.input)
    os.makedirs(args.out_dir, exist_ok=True)

    def work(scene):
        return rasterize_elements(list(scene.elements), spec, prange)

    for scene, grid in zip(scenes, map_frames(work, scenes)):
        json_path, bin_path = io.mask_paths(args.out_dir, scene)
        io.write_mask_files(grid, json_path, bin_path)
    return 0


def _paired_frames(gt_path, pred_path):
    """Scene records from both files, paired by (scene_id, frame_id)."""
    gt_scenes = io.read_scenes(gt_path)
    pred_scenes = io.read_scenes(pred_path)
    pred_by_key = {s.key: s for s in pred_scenes}
    gt_keys = {s.key for s in gt_scenes}
    missing_pred = [s.key for s in gt_scenes if s.key not in pred_by_key]
    missing_gt = sorted(k for k in pred_by_key if k not in gt_keys)
    if missing_pred or missing_gt:
        parts = []
        if missing_pred:
            parts.append(f"frames missing from {pred_path}: {missing_pred}")
        if missing_gt:
            parts.append(f"frames missing from {gt_path}: {missing_gt}")
        raise ValueError("; ".join(parts))
    return [(g, pred_by_key[g.key]) for g in gt_scenes]


def _cmd_eval(args) -> int:
    spec = EvalSpec(
        thresholds=tuple(_parse_floats(args.thresholds, "thresholds")),
        n_points=args.points,
        classes=_parse_classes(args.classes),
    )
    pairs = _paired_frames(args.gt, args.pred)
    gts_by_scene = {g.key: list(g.elements) for g, _ in pairs}
    preds_by_scene = {p.key: list(p.predictions or ()) for _, p in pairs}
    report = evaluate(preds_by_scene, gts_by_scene, spec)
    io.write_json(args.report, report.to_json_dict())
    print(f"mAP {format_ap_percent(100.0 * report.map_ap)}")
    return 0


def _cmd_match(args) -> int:
    spec = CostSpec(w_cls=args.w_cls, w_pts=args.w_pts, n_points=args.points)
    pairs = _paired_frames(args.gt, args.pred)

    def work(pair):
        gt_scene, pred_scene = pair
        preds = [(p.element, _scores_for(p.element, p.confidence))
                 for p in (pred_scene.predictions or ())]
        assignment = match_predictions(preds, list(gt_scene.elements), spec)
        return io.assignment_to_dict(gt_scene, assignment)

    io.write_jsonl(args.out, map_frames(work, pairs))
    return 0


def _synthetic_elements(seed: int, count: int) -> list[MapElement]:
    """Deterministic mix of open polylines and closed polygons for benchmarks."""
    out = []
    labels = [ClassLabel.DIVIDER, ClassLabel.BOUNDARY,
              ClassLabel.CENTERLINE, ClassLabel.PED_CROSSING]
    for i in range(count):
        s = Stream(seed, i)
        label = labels[i % len(labels)]
        cx = s.uniform(-12.0, 12.0)
        cy = s.uniform(-25.0, 25.0)
        if label is ClassLabel.PED_CROSSING:
            half = s.uniform(1.0, 3.0)
            pts = [[cx - half, cy - half], [cx + half, cy - half],
                   [cx + half, cy + half], [cx - half, cy + half]]
        else:
            length = s.uniform(8.0, 20.0)
            bend = s.uniform(-2.0, 2.0)
            ys = np.linspace(cy - length / 2, cy + length / 2, 8)
            rel = np.linspace(-1.0, 1.0, 8)
            xs = cx + bend * rel * rel
            pts = np.column_stack([xs, ys])
        out.append(make_element(label, pts))
    return out


def _bench_raster(size: int) -> str:
    elements = _synthetic_elements(7, size * 6)
    prange = PerceptionRange(-15.0, 15.0, -30.0, 30.0)
    spec = RasterSpec()
    t0 = time.perf_counter()
    grid = rasterize_elements(elements, spec, prange)
    dt = time.perf_counter() - t0
    pixels = grid.data.size
    return (f"suite=raster elements={len(elements)} pixels={pixels} "
            f"foreground={int((grid.data != 0).sum())} "
            f"pixels_per_s={pixels / dt:.0f} elapsed_s={dt:.3f}")


def _bench_eval(size: int) -> str:
    from .evaluation import Prediction

    gts = _synthetic_elements(11, size * 4)
    preds = [Prediction(e, 1.0) for e in gts]
    spec = EvalSpec()
    t0 = time.perf_counter()
    report = evaluate(preds, gts, spec)
    dt = time.perf_counter() - t0
    per_s = len(gts) / dt if dt > 0 else float("inf")
    return (f"suite=eval elements={len(gts)} map={report.map_ap:.3f} "
            f"elements_per_s={per_s:.0f} elapsed_s={dt:.3f}")


def _demo_rig(views: int, levels: int, channels: int, seed: int):
    """Synthetic camera ring and feature pyramids for the kernel commands."""
    cams = []
    for v in range(views):
        yaw = 2.0 * math.pi * v / views
        # camera at 1.6 m height looking outward along the ring direction
        fwd = np.array([math.cos(yaw), math.sin(yaw), 0.0])
        right = np.array([math.sin(yaw), -math.cos(yaw), 0.0])
        down = np.array([0.0, 0.0, -1.0])
        rot = np.stack([right, down, fwd])  # world axes -> camera x right, y down, z forward
        t = -rot @ np.array([0.0, 0.0, 1.6])
        ext = np.eye(4)
        ext[:3, :3] = rot
        ext[:3, 3] = t
        intr = np.array([[400.0, 0.0, 320.0], [0.0, 400.0, 240.0], [0.0, 0.0, 1.0]])
        cams.append(CameraModel(intrinsics=intr, extrinsics=ext, image_size=(640, 480)))
    pyramids = []
    for v in range(views):
        grids = []
        strides = []
        h, w = 32, 40
        for l in range(levels):
            s = Stream(seed, v, l)
            vals = np.array([s.uniform(-1.0, 1.0) for _ in range(h * w * channels)])
            grids.append(vals.reshape(h, w, channels))
            strides.append(float(2 ** (l + 3)))
            h, w = max(2, h // 2), max(2, w // 2)
        pyramids.append(FeaturePyramid(levels=tuple(grids), strides=tuple(strides)))
    return cams, pyramids


def _demo_sample_set(keypoints: np.ndarray, views: int, levels: int, seed: int, salt: int) -> SamplePointSet:
    k = len(keypoints)
    s = Stream(seed, salt)
    offsets = np.array([s.uniform(-0.02, 0.02) for _ in range(k * views * levels * 2)])
    raw = np.array([s.uniform(0.1, 1.0) for _ in range(k * views * levels)])
    weights = raw / math.fsum(raw.tolist())
    return SamplePointSet(keypoints=keypoints,
                          offsets=offsets.reshape(k, views, levels, 2),
                          weights=weights.reshape(k, views, levels))


def _bench_dfa(size: int) -> str:
    cams, pyramids = _demo_rig(views=4, levels=3, channels=16, seed=3)
    element = _synthetic_elements(5, 1)[0]
    kp = keypoints_from_element(element, max(2, size * 8), z=0.0)
    cls_sp = _demo_sample_set(kp, 4, 3, seed=3, salt=1)
    reg_sp = _demo_sample_set(kp, 4, 3, seed=3, salt=2)
    t0 = time.perf_counter()
    cls_out, reg_out = decoupled_aggregate(pyramids, cams, cls_sp, reg_sp)
    dt = time.perf_counter() - t0
    per_s = len(kp) / dt if dt > 0 else float("inf")
    return (f"suite=dfa keypoints={len(kp)} valid={int(cls_out.validity.sum())} "
            f"cls_norm={float(np.linalg.norm(cls_out.vector)):.6f} "
            f"reg_norm={float(np.linalg.norm(reg_out.vector)):.6f} "
            f"keypoints_per_s={per_s:.0f} elapsed_s={dt:.3f}")


def _cmd_bench(args) -> int:
    print(f"machine {platform.platform()} python {platform.python_version()} "
          f"cpus={os.cpu_count()}")
    runner = {"raster": _bench_raster, "eval": _bench_eval, "dfa": _bench_dfa}[args.suite]
    print(runner(args.size))
    return 0


def _cmd_project(args) -> int:
    cams, pyramids = _demo_rig(args.views, args.levels, args.channels, args.seed)
    element = _synthetic_elements(args.seed, 1)[0]
    kp = keypoints_from_element(element, args.keypoints, z=0.0)
    cls_sp = _demo_sample_set(kp, args.views, args.levels, args.seed, salt=1)
    reg_sp = _demo_sample_set(kp, args.views, args.levels, args.seed, salt=2)
    cls_out, reg_out = decoupled_aggregate(pyramids, cams, cls_sp, reg_sp)
    valid = int(cls_out.validity.sum())
    total = cls_out.validity.size
    print(f"keypoints={len(kp)} views={args.views} levels={args.levels} "
          f"channels={args.channels} valid_projections={valid}/{total}")
    print(f"cls_feature {np.array2string(cls_out.vector, precision=6)}")
    print(f"reg_feature {np.array2string(reg_out.vector, precision=6)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mapforge",
        description="Deterministic geometry toolkit for vectorized HD-map pipelines.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-noise", help="write physical-prior noised copies of GT elements")
    g.add_argument("--input", required=True, help="scene JSONL")
    g.add_argument("--output", required=True, help="output JSONL of denoise groups")
    g.add_argument("--rot-max-deg", type=float, default=15.0)
    g.add_argument("--trans-max", type=float, default=1.0)
    g.add_argument("--scale-min", type=float, default=0.9)
    g.add_argument("--scale-max", type=float, default=1.1)
    g.add_argument("--curv-min", type=float, default=0.9)
    g.add_argument("--curv-max", type=float, default=1.1)
    g.add_argument("--groups", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=_cmd_gen_noise)

    r = sub.add_parser("rasterize", help="write per-class BEV foreground masks")
    r.add_argument("--input", required=True, help="scene JSONL")
    r.add_argument("--range", default="-15,15,-30,30", help="x_min,x_max,y_min,y_max meters")
    r.add_argument("--resolution", type=float, default=0.15, help="meters per pixel")
    r.add_argument("--half-width", type=float, default=0.5, help="polyline dilation radius, meters")
    r.add_argument("--out-dir", required=True)
    r.set_defaults(func=_cmd_rasterize)

    e = sub.add_parser("eval", help="Chamfer-distance AP evaluation")
    e.add_argument("--gt", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--thresholds", default="0.5,1.0,1.5")
    e.add_argument("--points", type=int, default=100)
    e.add_argument("--classes", default="ped_crossing,divider,boundary")
    e.add_argument("--report", required=True)
    e.set_defaults(func=_cmd_eval)

    m = sub.add_parser("match", help="assign predictions to ground truths per frame")
    m.add_argument("--gt", required=True)
    m.add_argument("--pred", required=True)
    m.add_argument("--w-cls", type=float, default=1.0)
    m.add_argument("--w-pts", type=float, default=1.0)
    m.add_argument("--points", type=int, default=20)
    m.add_argument("--out", required=True)
    m.set_defaults(func=_cmd_match)

    b = sub.add_parser("bench", help="self-measured throughput report")
    b.add_argument("--suite", required=True, choices=["raster", "eval", "dfa"])
    b.add_argument("--size", type=int, default=4)
    b.set_defaults(func=_cmd_bench)

    j = sub.add_parser("project", help="run the feature-aggregation kernel on a synthetic rig")
    j.add_argument("--views", type=int, default=4)
    j.add_argument("--levels", type=int, default=2)
    j.add_argument("--channels", type=int, default=8)
    j.add_argument("--keypoints", type=int, default=16)
    j.add_argument("--seed", type=int, default=0)
    j.set_defaults(func=_cmd_project)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"mapforge: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
