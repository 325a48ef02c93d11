import { BindingError } from "./errors.js";

/** Class codes 0..3 follow this fixed order on both sides of the wire. */
export const CLASS_NAMES = ["ped_crossing", "divider", "boundary", "centerline"] as const;
export type ClassName = (typeof CLASS_NAMES)[number];

export const PED_CROSSING = 0;
export const DIVIDER = 1;
export const BOUNDARY = 2;
export const CENTERLINE = 3;

/** Contiguous element batch: points (numElements, nPoints, 2) in C order. */
export interface FlatElementBatch {
  points: Float64Array;
  classes: Int32Array | Uint8Array;
  /** 0/1 per element; must agree with the class (only ped_crossing is closed). */
  closed: Uint8Array;
  numElements: number;
  nPoints: number;
}

export function validateBatch(op: string, b: FlatElementBatch): void {
  if (!Number.isInteger(b.numElements) || b.numElements < 0) {
    throw new BindingError(op, null, "numElements must be a non-negative integer");
  }
  if (!Number.isInteger(b.nPoints) || b.nPoints < 2) {
    throw new BindingError(op, null, "nPoints must be an integer >= 2");
  }
  const want = b.numElements * b.nPoints * 2;
  if (b.points.length !== want) {
    throw new BindingError(op, null, `points length ${b.points.length}, expected ${want}`);
  }
  if (b.classes.length !== b.numElements) {
    throw new BindingError(op, null, `classes length ${b.classes.length}, expected ${b.numElements}`);
  }
  if (b.closed.length !== b.numElements) {
    throw new BindingError(op, null, `closed length ${b.closed.length}, expected ${b.numElements}`);
  }
  const stride = b.nPoints * 2;
  for (let i = 0; i < b.numElements; i++) {
    const code = b.classes[i];
    if (code < 0 || code >= CLASS_NAMES.length) {
      throw new BindingError(op, i, `class code ${code} out of range 0..${CLASS_NAMES.length - 1}`);
    }
    const wantClosed = code === PED_CROSSING ? 1 : 0;
    if ((b.closed[i] === 0 ? 0 : 1) !== wantClosed) {
      throw new BindingError(op, i, `${CLASS_NAMES[code]} must have closed=${wantClosed === 1}`);
    }
    for (let j = 0; j < stride; j++) {
      if (!Number.isFinite(b.points[i * stride + j])) {
        throw new BindingError(op, i, "points must be finite");
      }
    }
  }
}

export interface ElementDict {
  class: string;
  closed: boolean;
  points: number[][];
}

/** Plain JSON element dicts in batch order (fresh arrays, inputs untouched). */
export function elementDicts(b: FlatElementBatch): ElementDict[] {
  const out: ElementDict[] = [];
  const stride = b.nPoints * 2;
  for (let i = 0; i < b.numElements; i++) {
    const pts: number[][] = [];
    for (let j = 0; j < b.nPoints; j++) {
      pts.push([b.points[i * stride + 2 * j], b.points[i * stride + 2 * j + 1]]);
    }
    out.push({ class: CLASS_NAMES[b.classes[i]], closed: b.closed[i] !== 0, points: pts });
  }
  return out;
}

/** Parse element dicts (all with the same point count) into a fresh batch. */
export function batchFromElements(op: string, dicts: ElementDict[], nPoints: number): FlatElementBatch {
  const n = dicts.length;
  const points = new Float64Array(n * nPoints * 2);
  const classes = new Uint8Array(n);
  const closed = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    const d = dicts[i];
    const code = CLASS_NAMES.indexOf(d.class as ClassName);
    if (code < 0) throw new BindingError(op, i, `unexpected class ${JSON.stringify(d.class)} in output`);
    if (d.points.length !== nPoints) {
      throw new BindingError(op, i, `output point count ${d.points.length}, expected ${nPoints}`);
    }
    classes[i] = code;
    closed[i] = d.closed ? 1 : 0;
    for (let j = 0; j < nPoints; j++) {
      points[(i * nPoints + j) * 2] = d.points[j][0];
      points[(i * nPoints + j) * 2 + 1] = d.points[j][1];
    }
  }
  return { points, classes, closed, numElements: n, nPoints };
}
