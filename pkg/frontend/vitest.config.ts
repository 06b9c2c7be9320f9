import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: "./tests/genFixtures.ts",
    testTimeout: 180_000,
    hookTimeout: 420_000,
  },
});
