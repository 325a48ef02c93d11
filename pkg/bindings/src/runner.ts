import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { BindingError } from "./errors.js";

export interface RunOptions {
  /** Python executable running the core CLI (default: $MAPFORGE_PYTHON or python3). */
  python?: string;
}

export function pythonExe(opts?: RunOptions): string {
  return opts?.python ?? process.env.MAPFORGE_PYTHON ?? "python3";
}

export function runCli(op: string, args: string[], opts?: RunOptions): { stdout: string; stderr: string } {
  const exe = pythonExe(opts);
  const res = spawnSync(exe, ["-m", "mapforge.cli", ...args], {
    encoding: "utf8",
    maxBuffer: 1 << 28,
  });
  if (res.error) {
    throw new BindingError(op, null, `failed to launch ${exe}: ${res.error.message}`);
  }
  if (res.status !== 0) {
    const msg = (res.stderr ?? "").trim();
    const reason = msg.startsWith("mapforge: ")
      ? msg.slice("mapforge: ".length)
      : msg || `exit code ${res.status}`;
    throw new BindingError(op, null, reason);
  }
  return { stdout: res.stdout ?? "", stderr: res.stderr ?? "" };
}

export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "mapforge-bind-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}
