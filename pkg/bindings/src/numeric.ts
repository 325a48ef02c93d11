/** Exact float helpers matching the core library's reporting arithmetic.
 *
 * fsum is a port of the shewchuk/msum algorithm used by Python's math.fsum
 * (exact partials, one correctly rounded result). formatFixed1 renders a
 * double at one decimal with round-half-to-even on the exact binary value,
 * which is what Python's "{:.1f}" does, so averaged table entries printed
 * here match the core byte for byte.
 */

import { BindingError } from "./errors.js";

export function fsum(values: Iterable<number>): number {
  const partials: number[] = [];
  for (let x of values) {
    if (!Number.isFinite(x)) throw new BindingError("fsum", null, "values must be finite");
    let i = 0;
    for (let j = 0; j < partials.length; j++) {
      let y = partials[j];
      if (Math.abs(x) < Math.abs(y)) {
        const t = x;
        x = y;
        y = t;
      }
      const hi = x + y;
      const lo = y - (hi - x);
      if (lo !== 0) partials[i++] = lo;
      x = hi;
    }
    partials.length = i;
    partials.push(x);
  }

  let n = partials.length;
  let hi = 0.0;
  if (n > 0) {
    hi = partials[--n];
    let lo = 0.0;
    while (n > 0) {
      const x = hi;
      const y = partials[--n];
      hi = x + y;
      const yr = hi - x;
      lo = y - yr;
      if (lo !== 0) break;
    }
    // half-even correction when the discarded tail would flip the last bit
    if (n > 0 && ((lo < 0 && partials[n - 1] < 0) || (lo > 0 && partials[n - 1] > 0))) {
      const y = lo * 2.0;
      const x = hi + y;
      if (y === x - hi) hi = x;
    }
  }
  return hi;
}

export function fmean(values: readonly number[]): number {
  if (values.length === 0) throw new BindingError("fmean", null, "mean of empty sequence");
  return fsum(values) / values.length;
}

/** Exactly Python's "{x:.1f}": decimal expansion of the double, half-even. */
export function formatFixed1(x: number): string {
  if (!Number.isFinite(x)) throw new BindingError("format", null, "value must be finite");
  const neg = x < 0 || Object.is(x, -0);
  const view = new DataView(new ArrayBuffer(8));
  view.setFloat64(0, Math.abs(x));
  const bits = view.getBigUint64(0);
  const expBits = Number((bits >> 52n) & 0x7ffn);
  const fracBits = bits & 0xfffffffffffffn;
  let mant: bigint;
  let exp: number;
  if (expBits === 0) {
    mant = fracBits;
    exp = -1074;
  } else {
    mant = fracBits | (1n << 52n);
    exp = expBits - 1075;
  }
  // round mant * 2^exp * 10 to an integer, ties to even
  let num = mant * 10n;
  let den = 1n;
  if (exp >= 0) num <<= BigInt(exp);
  else den = 1n << BigInt(-exp);
  const q = num / den;
  const r = num % den;
  let scaled = q;
  const twice = r * 2n;
  if (twice > den || (twice === den && (q & 1n) === 1n)) scaled += 1n;
  const sign = neg ? "-" : "";
  return `${sign}${scaled / 10n}.${scaled % 10n}`;
}

/** Result-table convention: average first, round once at the end. */
export function meanApPercent(values: readonly number[]): string {
  return formatFixed1(fmean(values));
}
