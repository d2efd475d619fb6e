import { defineConfig } from "vitest/config";

export default defineConfig({
  server: { port: 5173 },
  test: {
    include: ["tests/**/*.test.ts"],
    // live.test.ts drives a real server and needs generous time
    testTimeout: 60000,
    hookTimeout: 60000,
  },
});
