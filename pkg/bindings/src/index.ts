export { BindingError } from "./errors.js";
export {
  BOUNDARY,
  CENTERLINE,
  CLASS_NAMES,
  DIVIDER,
  PED_CROSSING,
  batchFromElements,
  elementDicts,
  validateBatch,
} from "./batch.js";
export type { ClassName, ElementDict, FlatElementBatch } from "./batch.js";
export { fmean, formatFixed1, fsum, meanApPercent } from "./numeric.js";
export { pythonExe, runCli, withTempDir } from "./runner.js";
export type { RunOptions } from "./runner.js";
export {
  APPLIED_FIELDS,
  benchRun,
  evaluateBatch,
  matchBatch,
  noiseBatch,
  projectRig,
  rasterizeBatch,
} from "./ops.js";
export type {
  ClassReport,
  EvalOptions,
  EvalReport,
  EvalResult,
  MatchOptions,
  MatchPairRecord,
  MatchResult,
  NoiseOptions,
  NoiseResult,
  ProjectOptions,
  ProjectResult,
  RasterOptions,
  RasterResult,
} from "./ops.js";

/** Matches the core library version this binding is built against. */
export const VERSION = "0.1.0";
