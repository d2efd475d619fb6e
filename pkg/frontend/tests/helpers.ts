// Shared helpers for tests that drive a real vehicle server subprocess.

import { spawn, type ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

export const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

export function freePort(): Promise<number> {
  return new Promise((res, rej) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr === null || typeof addr === "string") {
        srv.close();
        rej(new Error("no port assigned"));
        return;
      }
      const port = addr.port;
      srv.close(() => res(port));
    });
    srv.on("error", rej);
  });
}

export interface LiveServer {
  proc: ChildProcess;
  wsUrl: string;
  httpBase: string;
  tcpPort: number;
  outDir: string;
  stderr: () => string;
  stop: () => Promise<void>;
}

const NOISELESS = [
  "sensor.pressure_noise_std_Pa=0",
  "sensor.compass_noise_std_deg=0",
  "sensor.gyro_noise_std_deg=0",
  "sim.gps_noise_std_m=0",
  // fast mode burns simulated hours of idle time in wall seconds; keep the
  // runaway cap clear of the test timeline
  "sim.max_mission_s=200000",
];

export async function startServer(extraSets: string[] = []): Promise<LiveServer> {
  const [tcpPort, wsPort, httpPort] = await Promise.all([freePort(), freePort(), freePort()]);
  const outDir = mkdtempSync(join(tmpdir(), "auvsim-console-"));
  const args = [
    "-m",
    "auvsim.cli",
    "serve",
    "--config",
    join(REPO_ROOT, "configs", "table1_defaults.conf"),
    "--seed",
    "5",
    "--out",
    outDir,
    "--listen",
    `127.0.0.1:${tcpPort}`,
    "--ws",
    `127.0.0.1:${wsPort}`,
    "--http",
    `127.0.0.1:${httpPort}`,
    "--fast",
  ];
  for (const s of [...NOISELESS, ...extraSets]) args.push("--set", s);

  const proc = spawn("python3", args, { cwd: REPO_ROOT, stdio: ["ignore", "ignore", "pipe"] });
  let stderrBuf = "";
  proc.stderr?.on("data", (chunk) => {
    stderrBuf += String(chunk);
  });

  const httpBase = `http://127.0.0.1:${httpPort}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (proc.exitCode !== null) {
      throw new Error(`server exited early (${proc.exitCode}): ${stderrBuf}`);
    }
    try {
      const res = await fetch(`${httpBase}/health`);
      if (res.ok) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) throw new Error(`server never came up: ${stderrBuf}`);
    await sleep(100);
  }

  return {
    proc,
    wsUrl: `ws://127.0.0.1:${wsPort}`,
    httpBase,
    tcpPort,
    outDir,
    stderr: () => stderrBuf,
    stop: async () => {
      if (proc.exitCode === null) {
        proc.kill("SIGTERM");
        await new Promise<void>((res) => {
          const t = setTimeout(() => {
            proc.kill("SIGKILL");
            res();
          }, 5000);
          proc.once("exit", () => {
            clearTimeout(t);
            res();
          });
        });
      }
    },
  };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((res) => setTimeout(res, ms));
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 45_000,
  what = "condition",
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await sleep(25);
  }
  throw new Error(`timed out waiting for ${what}`);
}
