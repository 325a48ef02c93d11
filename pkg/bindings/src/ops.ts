/** Batch operations over the core CLI.
 *
 * Every call round-trips through the stable file formats: inputs are
 * serialized to scene JSONL in a temp dir, one CLI invocation runs, and
 * outputs are parsed back into freshly allocated typed arrays. Floats
 * survive both directions exactly (shortest round-trip decimal on both
 * sides), so results are bit-identical to the core library.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { BindingError } from "./errors.js";
import {
  ElementDict,
  FlatElementBatch,
  batchFromElements,
  elementDicts,
  validateBatch,
} from "./batch.js";
import { RunOptions, runCli, withTempDir } from "./runner.js";

function sceneLine(elements: ElementDict[], predictions?: object[]): string {
  const rec: Record<string, unknown> = {
    scene_id: "batch",
    frame_id: "0",
    ego_pose: { x: 0, y: 0, yaw: 0 },
    elements,
  };
  if (predictions !== undefined) rec.predictions = predictions;
  return JSON.stringify(rec) + "\n";
}

function validateConfidences(op: string, pred: FlatElementBatch, confidences: ArrayLike<number>): void {
  if (confidences.length !== pred.numElements) {
    throw new BindingError(op, null, `confidences length ${confidences.length}, expected ${pred.numElements}`);
  }
  for (let i = 0; i < confidences.length; i++) {
    const c = confidences[i];
    if (!Number.isFinite(c) || c < 0 || c > 1) {
      throw new BindingError(op, i, `confidence ${c} must be a finite number in [0, 1]`);
    }
  }
}

function predictionDicts(pred: FlatElementBatch, confidences: ArrayLike<number>): object[] {
  return elementDicts(pred).map((d, i) => ({ ...d, confidence: confidences[i] }));
}

// ---------------------------------------------------------------- noise

export interface NoiseOptions extends RunOptions {
  rotMaxDeg?: number;
  transMax?: number;
  scaleMin?: number;
  scaleMax?: number;
  curvMin?: number;
  curvMax?: number;
  groups?: number;
  seed?: number;
}

export interface NoiseResult {
  /** groups * numElements noised elements, group-major, gt order within a group. */
  noised: FlatElementBatch;
  /** (groups * numElements, 6) rows of theta, dx, dy, sx, sy, c. */
  applied: Float64Array;
  curvatureApplied: Uint8Array;
  groups: number;
}

export const APPLIED_FIELDS = ["theta", "dx", "dy", "sx", "sy", "c"] as const;

function noiseFlags(opts: NoiseOptions): string[] {
  const flags: string[] = [];
  const push = (name: string, v: number | undefined) => {
    if (v !== undefined) flags.push(`--${name}=${v}`);
  };
  push("rot-max-deg", opts.rotMaxDeg);
  push("trans-max", opts.transMax);
  push("scale-min", opts.scaleMin);
  push("scale-max", opts.scaleMax);
  push("curv-min", opts.curvMin);
  push("curv-max", opts.curvMax);
  push("groups", opts.groups);
  push("seed", opts.seed);
  return flags;
}

export function noiseBatch(batch: FlatElementBatch, opts: NoiseOptions = {}): NoiseResult {
  const op = "noise_batch";
  validateBatch(op, batch);
  return withTempDir((dir) => {
    const inp = path.join(dir, "in.jsonl");
    const out = path.join(dir, "out.jsonl");
    fs.writeFileSync(inp, sceneLine(elementDicts(batch)));
    runCli(op, ["gen-noise", "--input", inp, "--output", out, ...noiseFlags(opts)], opts);

    const rec = JSON.parse(fs.readFileSync(out, "utf8").split("\n")[0]);
    const groups = rec.groups as { group_index: number; items: any[] }[];
    const flat: ElementDict[] = [];
    const appliedRows: number[] = [];
    const curv: number[] = [];
    for (const g of groups) {
      if (g.items.length !== batch.numElements) {
        throw new BindingError(op, null, `group ${g.group_index} has ${g.items.length} items, expected ${batch.numElements}`);
      }
      for (const item of g.items) {
        flat.push(item.element);
        const a = item.applied;
        appliedRows.push(a.theta, a.dx, a.dy, a.sx, a.sy, a.c);
        curv.push(a.curvature_applied ? 1 : 0);
      }
    }
    return {
      noised: batchFromElements(op, flat, batch.nPoints),
      applied: Float64Array.from(appliedRows),
      curvatureApplied: Uint8Array.from(curv),
      groups: groups.length,
    };
  });
}

// ------------------------------------------------------------- rasterize

export interface RasterOptions extends RunOptions {
  /** x_min, x_max, y_min, y_max in meters. */
  range?: [number, number, number, number];
  resolution?: number;
  halfWidth?: number;
}

export interface RasterResult {
  /** (classes, height, width) C order, bytes 0 or 255, freshly allocated. */
  data: Uint8Array;
  height: number;
  width: number;
  resolution: number;
  range: { x_min: number; x_max: number; y_min: number; y_max: number };
  classes: string[];
}

export function rasterizeBatch(batch: FlatElementBatch, opts: RasterOptions = {}): RasterResult {
  const op = "rasterize_batch";
  validateBatch(op, batch);
  const flags: string[] = [];
  if (opts.range !== undefined) flags.push(`--range=${opts.range.join(",")}`);
  if (opts.resolution !== undefined) flags.push(`--resolution=${opts.resolution}`);
  if (opts.halfWidth !== undefined) flags.push(`--half-width=${opts.halfWidth}`);
  return withTempDir((dir) => {
    const inp = path.join(dir, "in.jsonl");
    const outDir = path.join(dir, "masks");
    fs.writeFileSync(inp, sceneLine(elementDicts(batch)));
    runCli(op, ["rasterize", "--input", inp, "--out-dir", outDir, ...flags], opts);

    const side = JSON.parse(fs.readFileSync(path.join(outDir, "batch_0.json"), "utf8"));
    const raw = fs.readFileSync(path.join(outDir, "batch_0.bin"));
    const expected = side.classes.length * side.height * side.width;
    if (raw.length !== expected) {
      throw new BindingError(op, null, `mask bytes ${raw.length}, expected ${expected}`);
    }
    return {
      data: new Uint8Array(raw), // copy out of the node Buffer pool
      height: side.height,
      width: side.width,
      resolution: side.resolution,
      range: side.range,
      classes: side.classes,
    };
  });
}

// ------------------------------------------------------------------ eval

export interface EvalOptions extends RunOptions {
  thresholds?: number[];
  nPoints?: number;
  classes?: string[];
}

export interface ClassReport {
  thresholds: number[];
  ap: number[];
  class_ap: number;
  /** Present and true when the class had no GTs and no predictions anywhere. */
  degenerate?: boolean;
}

export interface EvalReport {
  classes: Record<string, ClassReport>;
  map: number;
  spec: { thresholds: number[]; n_points: number; classes: string[] };
}

export interface EvalResult {
  report: EvalReport;
  /** The printed percent ("100.0" style), rounded once at the end. */
  mapPercent: string;
}

export function evaluateBatch(
  gt: FlatElementBatch,
  pred: FlatElementBatch,
  confidences: Float64Array | number[],
  opts: EvalOptions = {},
): EvalResult {
  const op = "evaluate_batch";
  validateBatch(op, gt);
  validateBatch(op, pred);
  validateConfidences(op, pred, confidences);
  const flags: string[] = [];
  if (opts.thresholds !== undefined) flags.push(`--thresholds=${opts.thresholds.join(",")}`);
  if (opts.nPoints !== undefined) flags.push(`--points=${opts.nPoints}`);
  if (opts.classes !== undefined) flags.push(`--classes=${opts.classes.join(",")}`);
  return withTempDir((dir) => {
    const gtPath = path.join(dir, "gt.jsonl");
    const predPath = path.join(dir, "pred.jsonl");
    const reportPath = path.join(dir, "report.json");
    fs.writeFileSync(gtPath, sceneLine(elementDicts(gt)));
    fs.writeFileSync(predPath, sceneLine([], predictionDicts(pred, confidences)));
    const { stdout } = runCli(
      op,
      ["eval", "--gt", gtPath, "--pred", predPath, "--report", reportPath, ...flags],
      opts,
    );
    const m = /^mAP (\S+)$/m.exec(stdout);
    if (!m) throw new BindingError(op, null, `no mAP line in output: ${JSON.stringify(stdout)}`);
    return {
      report: JSON.parse(fs.readFileSync(reportPath, "utf8")) as EvalReport,
      mapPercent: m[1],
    };
  });
}

// ----------------------------------------------------------------- match

export interface MatchOptions extends RunOptions {
  wCls?: number;
  wPts?: number;
  points?: number;
}

export interface MatchPairRecord {
  pred_index: number;
  gt_index: number;
  cost: number;
  point_cost: number;
  best_variant: string;
}

export interface MatchResult {
  pairs: MatchPairRecord[];
  unmatched_preds: number[];
  unmatched_gts: number[];
}

export function matchBatch(
  gt: FlatElementBatch,
  pred: FlatElementBatch,
  confidences: Float64Array | number[],
  opts: MatchOptions = {},
): MatchResult {
  const op = "match_batch";
  validateBatch(op, gt);
  validateBatch(op, pred);
  validateConfidences(op, pred, confidences);
  const flags: string[] = [];
  if (opts.wCls !== undefined) flags.push(`--w-cls=${opts.wCls}`);
  if (opts.wPts !== undefined) flags.push(`--w-pts=${opts.wPts}`);
  if (opts.points !== undefined) flags.push(`--points=${opts.points}`);
  return withTempDir((dir) => {
    const gtPath = path.join(dir, "gt.jsonl");
    const predPath = path.join(dir, "pred.jsonl");
    const outPath = path.join(dir, "assign.jsonl");
    fs.writeFileSync(gtPath, sceneLine(elementDicts(gt)));
    fs.writeFileSync(predPath, sceneLine([], predictionDicts(pred, confidences)));
    runCli(op, ["match", "--gt", gtPath, "--pred", predPath, "--out", outPath, ...flags], opts);
    const rec = JSON.parse(fs.readFileSync(outPath, "utf8").split("\n")[0]);
    return {
      pairs: rec.pairs,
      unmatched_preds: rec.unmatched_preds,
      unmatched_gts: rec.unmatched_gts,
    };
  });
}

// --------------------------------------------------- project / bench

export interface ProjectOptions extends RunOptions {
  views?: number;
  levels?: number;
  channels?: number;
  keypoints?: number;
  seed?: number;
}

export interface ProjectResult {
  keypoints: number;
  views: number;
  levels: number;
  channels: number;
  validProjections: number;
  totalProjections: number;
  /** Raw CLI output, including the printed feature vectors. */
  stdout: string;
}

export function projectRig(opts: ProjectOptions = {}): ProjectResult {
  const op = "project";
  const flags: string[] = [];
  const push = (name: string, v: number | undefined) => {
    if (v !== undefined) flags.push(`--${name}=${v}`);
  };
  push("views", opts.views);
  push("levels", opts.levels);
  push("channels", opts.channels);
  push("keypoints", opts.keypoints);
  push("seed", opts.seed);
  const { stdout } = runCli(op, ["project", ...flags], opts);
  const m = /^keypoints=(\d+) views=(\d+) levels=(\d+) channels=(\d+) valid_projections=(\d+)\/(\d+)$/m.exec(stdout);
  if (!m) throw new BindingError(op, null, `unexpected output: ${JSON.stringify(stdout)}`);
  return {
    keypoints: Number(m[1]),
    views: Number(m[2]),
    levels: Number(m[3]),
    channels: Number(m[4]),
    validProjections: Number(m[5]),
    totalProjections: Number(m[6]),
    stdout,
  };
}

/** Raw passthrough; timing fields vary run to run by design. */
export function benchRun(suite: "raster" | "eval" | "dfa", size?: number, opts: RunOptions = {}): { stdout: string } {
  const flags = ["--suite", suite];
  if (size !== undefined) flags.push(`--size=${size}`);
  const { stdout } = runCli("bench", ["bench", ...flags], opts);
  return { stdout };
}
