import json
import os
import subprocess
import sys

import numpy as np
import pytest

from mapforge import (
    ClassLabel,
    EgoPose,
    EvalSpec,
    Prediction,
    SceneRecord,
    evaluate,
    make_element,
    write_scenes,
)

DIV = ClassLabel.DIVIDER
PED = ClassLabel.PED_CROSSING
BOUND = ClassLabel.BOUNDARY


def run_cli(*args, env=None):
    cmd = [sys.executable, "-m", "mapforge.cli", *args]
    full_env = os.environ.copy()
    full_env.pop("MAPFORGE_THREADS", None)
    if env:
        full_env.update(env)
    return subprocess.run(cmd, capture_output=True, text=True, env=full_env)


def demo_scenes(with_preds=False):
    frames = []
    for i in range(3):
        elements = (
            make_element(DIV, [(-5.0, -1.0 + i), (5.0, -1.0 + i)]),
            make_element(BOUND, [(-8.0, -20.0), (-8.0, 20.0)]),
            make_element(PED, [(1.0, 4.0 + i), (4.0, 4.0 + i),
                               (4.0, 7.0 + i), (1.0, 7.0 + i)]),
        )
        preds = tuple(Prediction(e, 1.0) for e in elements) if with_preds else None
        frames.append(SceneRecord(scene_id="s0", frame_id=f"f{i}",
                                  ego_pose=EgoPose(0.0, 0.0, 0.0),
                                  elements=elements, predictions=preds))
    return frames


@pytest.fixture
def scene_file(tmp_path):
    path = tmp_path / "scenes.jsonl"
    write_scenes(path, demo_scenes())
    return path


@pytest.fixture
def pred_file(tmp_path):
    path = tmp_path / "preds.jsonl"
    write_scenes(path, demo_scenes(with_preds=True))
    return path


# ---------------------------------------------------------------- gen-noise


def test_gen_noise_runs_and_is_deterministic(scene_file, tmp_path):
    out1 = tmp_path / "n1.jsonl"
    out2 = tmp_path / "n2.jsonl"
    for out in (out1, out2):
        res = run_cli("gen-noise", "--input", str(scene_file),
                      "--output", str(out), "--seed", "9")
        assert res.returncode == 0, res.stderr
    assert out1.read_bytes() == out2.read_bytes()


def test_gen_noise_thread_count_invariant(scene_file, tmp_path):
    outs = []
    for threads in ("1", "7"):
        out = tmp_path / f"t{threads}.jsonl"
        res = run_cli("gen-noise", "--input", str(scene_file), "--output", str(out),
                      env={"MAPFORGE_THREADS": threads})
        assert res.returncode == 0, res.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_gen_noise_identity_settings(scene_file, tmp_path):
    out = tmp_path / "ident.jsonl"
    res = run_cli("gen-noise", "--input", str(scene_file), "--output", str(out),
                  "--rot-max-deg", "0", "--trans-max", "0",
                  "--scale-min", "1", "--scale-max", "1",
                  "--curv-min", "1", "--curv-max", "1", "--groups", "2")
    assert res.returncode == 0, res.stderr
    originals = {s.frame_id: s for s in demo_scenes()}
    for line in out.read_text().splitlines():
        rec = json.loads(line)
        gt = originals[rec["frame_id"]]
        assert len(rec["groups"]) == 2
        for group in rec["groups"]:
            for item in group["items"]:
                want = gt.elements[item["gt_index"]].points
                got = np.array(item["element"]["points"])
                assert np.abs(got - want).max() <= 1e-9


def test_gen_noise_zero_groups(scene_file, tmp_path):
    out = tmp_path / "none.jsonl"
    res = run_cli("gen-noise", "--input", str(scene_file), "--output", str(out),
                  "--groups", "0")
    assert res.returncode == 0, res.stderr
    for line in out.read_text().splitlines():
        assert json.loads(line)["groups"] == []


def test_gen_noise_reports_malformed_input(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"scene_id":"s","frame_id":"f","ego_pose":{"x":0,"y":0,"yaw":0},"elements":[]}\n{oops\n')
    res = run_cli("gen-noise", "--input", str(bad), "--output", str(tmp_path / "o.jsonl"))
    assert res.returncode == 1
    assert "line 2" in res.stderr
    assert res.stderr.startswith("mapforge:")


def test_bad_thread_env_is_reported(scene_file, tmp_path):
    res = run_cli("gen-noise", "--input", str(scene_file),
                  "--output", str(tmp_path / "o.jsonl"),
                  env={"MAPFORGE_THREADS": "abc"})
    assert res.returncode == 1
    assert "must be an integer" in res.stderr


# ---------------------------------------------------------------- rasterize


def test_rasterize_writes_default_grid(scene_file, tmp_path):
    out_dir = tmp_path / "masks"
    res = run_cli("rasterize", "--input", str(scene_file), "--out-dir", str(out_dir))
    assert res.returncode == 0, res.stderr
    for i in range(3):
        meta = json.loads((out_dir / f"s0_f{i}.json").read_text())
        assert (meta["height"], meta["width"]) == (400, 200)
        blob = (out_dir / f"s0_f{i}.bin").read_bytes()
        assert len(blob) == 4 * 400 * 200
        assert any(b == 255 for b in blob)  # scene elements hit the range


def test_rasterize_custom_range(scene_file, tmp_path):
    out_dir = tmp_path / "masks"
    res = run_cli("rasterize", "--input", str(scene_file), "--out-dir", str(out_dir),
                  "--range=-30,30,-45,45")
    assert res.returncode == 0, res.stderr
    meta = json.loads((out_dir / "s0_f0.json").read_text())
    assert (meta["height"], meta["width"]) == (600, 400)
    assert len((out_dir / "s0_f0.bin").read_bytes()) == 4 * 600 * 400


def test_rasterize_empty_frame_is_all_zero(tmp_path):
    path = tmp_path / "empty.jsonl"
    write_scenes(path, [SceneRecord(scene_id="s", frame_id="f",
                                    ego_pose=EgoPose(0, 0, 0), elements=())])
    out_dir = tmp_path / "masks"
    res = run_cli("rasterize", "--input", str(path), "--out-dir", str(out_dir))
    assert res.returncode == 0, res.stderr
    assert (out_dir / "s_f.bin").read_bytes() == bytes(4 * 400 * 200)


def test_rasterize_thread_count_invariant(scene_file, tmp_path):
    blobs = []
    for threads in ("1", "5"):
        out_dir = tmp_path / f"masks{threads}"
        res = run_cli("rasterize", "--input", str(scene_file), "--out-dir", str(out_dir),
                      env={"MAPFORGE_THREADS": threads})
        assert res.returncode == 0, res.stderr
        blobs.append(b"".join((out_dir / f"s0_f{i}.bin").read_bytes() for i in range(3)))
    assert blobs[0] == blobs[1]


# --------------------------------------------------------------------- eval


def test_eval_perfect_predictions(scene_file, pred_file, tmp_path):
    report_path = tmp_path / "report.json"
    res = run_cli("eval", "--gt", str(scene_file), "--pred", str(pred_file),
                  "--report", str(report_path))
    assert res.returncode == 0, res.stderr
    assert "mAP 100.0" in res.stdout

    scenes = demo_scenes(with_preds=True)
    gts = {s.key: list(s.elements) for s in scenes}
    preds = {s.key: list(s.predictions) for s in scenes}
    spec = EvalSpec(classes=(PED, DIV, BOUND))
    want = evaluate(preds, gts, spec).to_json_dict()
    assert json.loads(report_path.read_text()) == want


def test_eval_reports_frame_mismatch(scene_file, tmp_path):
    pred_path = tmp_path / "short.jsonl"
    write_scenes(pred_path, demo_scenes(with_preds=True)[:2])
    res = run_cli("eval", "--gt", str(scene_file), "--pred", str(pred_path),
                  "--report", str(tmp_path / "r.json"))
    assert res.returncode == 1
    assert "frames missing from" in res.stderr
    assert "f2" in res.stderr


# -------------------------------------------------------------------- match


def test_match_identity_predictions(scene_file, pred_file, tmp_path):
    out = tmp_path / "assign.jsonl"
    res = run_cli("match", "--gt", str(scene_file), "--pred", str(pred_file),
                  "--out", str(out))
    assert res.returncode == 0, res.stderr
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    for line in lines:
        rec = json.loads(line)
        assert rec["unmatched_preds"] == [] and rec["unmatched_gts"] == []
        assert {p["pred_index"] for p in rec["pairs"]} == {0, 1, 2}
        for pair in rec["pairs"]:
            assert pair["pred_index"] == pair["gt_index"]
            assert pair["point_cost"] == 0.0
            assert pair["best_variant"] == "forward"


# ----------------------------------------------------------- bench, project


def test_bench_raster_prints_counts():
    res = run_cli("bench", "--suite", "raster", "--size", "1")
    assert res.returncode == 0, res.stderr
    assert "suite=raster" in res.stdout
    assert "elements=6" in res.stdout
    assert "pixels_per_s=" in res.stdout


def test_bench_eval_runs():
    res = run_cli("bench", "--suite", "eval", "--size", "1")
    assert res.returncode == 0, res.stderr
    assert "suite=eval" in res.stdout
    assert "map=1.000" in res.stdout


def test_project_reports_projection_counts():
    res = run_cli("project", "--keypoints", "12", "--seed", "2")
    assert res.returncode == 0, res.stderr
    assert "keypoints=12" in res.stdout
    assert "valid_projections=" in res.stdout
    assert "cls_feature" in res.stdout and "reg_feature" in res.stdout


def test_unknown_subcommand_fails():
    res = run_cli("frobnicate")
    assert res.returncode == 2  # argparse usage error
