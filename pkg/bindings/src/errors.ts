/** Structured failure payload: which operation, which element, and why. */
export class BindingError extends Error {
  readonly operation: string;
  /** Offending element index for per-element violations, else null. */
  readonly index: number | null;
  readonly reason: string;

  constructor(operation: string, index: number | null, reason: string) {
    super(index === null ? `${operation}: ${reason}` : `${operation}: element ${index}: ${reason}`);
    this.name = "BindingError";
    this.operation = operation;
    this.index = index;
    this.reason = reason;
  }
}
