import { spawnSync } from "node:child_process";

import {
  BOUNDARY,
  CENTERLINE,
  DIVIDER,
  PED_CROSSING,
  type ElementDict,
  type FlatElementBatch,
  CLASS_NAMES,
} from "../src/index.js";

const MASK = (1n << 64n) - 1n;

/** splitmix64; only used to generate reproducible test data. */
export class Rng {
  private state: bigint;

  constructor(seed: number) {
    this.state = BigInt(seed) & MASK;
  }

  nextU64(): bigint {
    this.state = (this.state + 0x9e3779b97f4a7c15n) & MASK;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK;
    return z ^ (z >> 31n);
  }

  float(): number {
    return Number(this.nextU64() >> 11n) / 9007199254740992;
  }

  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.float();
  }

  int(n: number): number {
    return Number(this.nextU64() % BigInt(n));
  }
}

/** Random batch of open polylines and rectangles, uniform point count. */
export function randomBatch(rng: Rng, numElements: number, nPoints: number,
                            codes: number[] = [PED_CROSSING, DIVIDER, BOUNDARY, CENTERLINE]): FlatElementBatch {
  const points = new Float64Array(numElements * nPoints * 2);
  const classes = new Uint8Array(numElements);
  const closed = new Uint8Array(numElements);
  for (let i = 0; i < numElements; i++) {
    const code = codes[rng.int(codes.length)];
    classes[i] = code;
    closed[i] = code === PED_CROSSING ? 1 : 0;
    const cx = rng.uniform(-10, 10);
    const cy = rng.uniform(-20, 20);
    if (code === PED_CROSSING) {
      // convex loop around (cx, cy); monotone angles keep vertices distinct
      for (let j = 0; j < nPoints; j++) {
        const ang = (2 * Math.PI * j) / nPoints + rng.uniform(0, 0.3 / nPoints);
        const rad = rng.uniform(1.0, 3.0);
        points[(i * nPoints + j) * 2] = cx + rad * Math.cos(ang);
        points[(i * nPoints + j) * 2 + 1] = cy + rad * Math.sin(ang);
      }
    } else {
      const len = rng.uniform(6, 18);
      const bend = rng.uniform(-2, 2);
      for (let j = 0; j < nPoints; j++) {
        const t = j / (nPoints - 1);
        points[(i * nPoints + j) * 2] = cx + bend * (2 * t - 1) * (2 * t - 1);
        points[(i * nPoints + j) * 2 + 1] = cy + len * (t - 0.5);
      }
    }
  }
  return { points, classes, closed, numElements, nPoints };
}

export function jitteredCopy(rng: Rng, batch: FlatElementBatch, scale: number): FlatElementBatch {
  const points = new Float64Array(batch.points.length);
  for (let i = 0; i < points.length; i++) {
    points[i] = batch.points[i] + rng.uniform(-scale, scale);
  }
  return {
    points,
    classes: Uint8Array.from(batch.classes),
    closed: Uint8Array.from(batch.closed),
    numElements: batch.numElements,
    nPoints: batch.nPoints,
  };
}

export function elementDictsOf(batch: FlatElementBatch): ElementDict[] {
  const out: ElementDict[] = [];
  const stride = batch.nPoints * 2;
  for (let i = 0; i < batch.numElements; i++) {
    const pts: number[][] = [];
    for (let j = 0; j < batch.nPoints; j++) {
      pts.push([batch.points[i * stride + 2 * j], batch.points[i * stride + 2 * j + 1]]);
    }
    out.push({
      class: CLASS_NAMES[batch.classes[i]],
      closed: batch.closed[i] !== 0,
      points: pts,
    });
  }
  return out;
}

export function sceneRecord(sceneId: string, frameId: string, elements: ElementDict[],
                            predictions?: object[]): Record<string, unknown> {
  const rec: Record<string, unknown> = {
    scene_id: sceneId,
    frame_id: frameId,
    ego_pose: { x: 0, y: 0, yaw: 0 },
    elements,
  };
  if (predictions !== undefined) rec.predictions = predictions;
  return rec;
}

export function runPython(args: string[], input?: string): { stdout: string; stderr: string; status: number } {
  const res = spawnSync(process.env.MAPFORGE_PYTHON ?? "python3", args, {
    encoding: "utf8",
    input,
    maxBuffer: 1 << 28,
  });
  if (res.error) throw res.error;
  return { stdout: res.stdout ?? "", stderr: res.stderr ?? "", status: res.status ?? -1 };
}

/** Recursive comparison with Object.is on leaves (bit-strict for numbers). */
export function deepBitEqual(a: unknown, b: unknown): boolean {
  if (Object.is(a, b)) return true;
  if (Array.isArray(a) && Array.isArray(b)) {
    return a.length === b.length && a.every((x, i) => deepBitEqual(x, b[i]));
  }
  if (a !== null && b !== null && typeof a === "object" && typeof b === "object") {
    const ka = Object.keys(a as object).sort();
    const kb = Object.keys(b as object).sort();
    if (ka.length !== kb.length || ka.some((k, i) => k !== kb[i])) return false;
    return ka.every((k) => deepBitEqual((a as any)[k], (b as any)[k]));
  }
  return false;
}
