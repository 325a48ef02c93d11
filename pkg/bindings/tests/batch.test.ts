import { describe, expect, it } from "vitest";

import {
  BindingError,
  DIVIDER,
  PED_CROSSING,
  batchFromElements,
  elementDicts,
  validateBatch,
  type FlatElementBatch,
} from "../src/index.js";
import { Rng, randomBatch } from "./helpers.js";

function tinyBatch(): FlatElementBatch {
  return {
    points: Float64Array.from([0, 0, 1, 0, 2, 0.5, 5, 5, 6, 5, 6, 6]),
    classes: Uint8Array.from([DIVIDER, DIVIDER]),
    closed: Uint8Array.from([0, 0]),
    numElements: 2,
    nPoints: 3,
  };
}

describe("validateBatch", () => {
  it("accepts a well-formed batch", () => {
    expect(() => validateBatch("t", tinyBatch())).not.toThrow();
  });

  it("reports the offending element index for class-code violations", () => {
    const b = tinyBatch();
    b.classes = Uint8Array.from([DIVIDER, 9]);
    try {
      validateBatch("t", b);
      expect.unreachable("should have thrown");
    } catch (err) {
      const e = err as BindingError;
      expect(e).toBeInstanceOf(BindingError);
      expect(e.operation).toBe("t");
      expect(e.index).toBe(1);
      expect(e.reason).toContain("class code 9");
    }
  });

  it("reports closed-flag contradictions with the index", () => {
    const b = tinyBatch();
    b.classes = Uint8Array.from([PED_CROSSING, DIVIDER]);
    // element 0 is ped_crossing but still marked open
    expect(() => validateBatch("t", b)).toThrowError(/element 0: ped_crossing must have closed=true/);
  });

  it("reports non-finite points with the index", () => {
    const b = tinyBatch();
    const pts = Float64Array.from(b.points);
    pts[7] = NaN; // inside element 1
    b.points = pts;
    try {
      validateBatch("t", b);
      expect.unreachable("should have thrown");
    } catch (err) {
      expect((err as BindingError).index).toBe(1);
    }
  });

  it("rejects shape mismatches without an element index", () => {
    const b = tinyBatch();
    b.nPoints = 4;
    try {
      validateBatch("t", b);
      expect.unreachable("should have thrown");
    } catch (err) {
      const e = err as BindingError;
      expect(e.index).toBeNull();
      expect(e.reason).toContain("points length");
    }
  });

  it("rejects nPoints below 2 and negative counts", () => {
    const b = tinyBatch();
    b.nPoints = 1;
    b.points = Float64Array.from([0, 0, 1, 1]);
    expect(() => validateBatch("t", b)).toThrowError(/nPoints/);
    const c = tinyBatch();
    c.numElements = -1;
    expect(() => validateBatch("t", c)).toThrowError(/numElements/);
  });
});

describe("dict round trip", () => {
  it("elementDicts -> batchFromElements preserves every bit", () => {
    const rng = new Rng(5);
    const b = randomBatch(rng, 7, 5);
    const back = batchFromElements("t", elementDicts(b), b.nPoints);
    expect(back.numElements).toBe(b.numElements);
    expect(Array.from(back.classes)).toEqual(Array.from(b.classes));
    expect(Array.from(back.closed)).toEqual(Array.from(b.closed));
    for (let i = 0; i < b.points.length; i++) {
      expect(Object.is(back.points[i], b.points[i])).toBe(true);
    }
    // freshly allocated, not views over the input
    expect(back.points).not.toBe(b.points);
    expect(back.classes).not.toBe(b.classes);
  });

  it("rejects unexpected class names and point-count drift", () => {
    const dicts = elementDicts(tinyBatch());
    (dicts[1] as any).class = "lane";
    expect(() => batchFromElements("t", dicts, 3)).toThrowError(/element 1: unexpected class/);
    const dicts2 = elementDicts(tinyBatch());
    dicts2[0].points = dicts2[0].points.slice(0, 2);
    expect(() => batchFromElements("t", dicts2, 3)).toThrowError(/element 0: output point count 2/);
  });
});
