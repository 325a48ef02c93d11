import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // equivalence tests spawn many CLI processes; run files one at a time
    // so process startup latency stays predictable
    fileParallelism: false,
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
