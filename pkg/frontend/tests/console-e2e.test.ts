// @vitest-environment jsdom

// The whole console, mounted and driven through DOM events, against a real
// fast-mode vehicle server subprocess. The WebSocket and fetch are the real
// network; only the canvas backend is missing in jsdom, so chart content is
// asserted on the model's series data rather than pixels.

import { afterAll, beforeAll, describe, expect, it, vi } from "vitest";

import { mountConsole, type MountedConsole } from "../src/main";
import { startServer, waitFor, type LiveServer } from "./helpers";

let server: LiveServer;
let mounted: MountedConsole;

function type(line: string): void {
  mounted.input.value = line;
  mounted.input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter" }));
}

function ackedLines(): string[] {
  return Array.from(mounted.historyList.querySelectorAll("li.cmd-ack")).map(
    (li) => li.textContent ?? "",
  );
}

beforeAll(async () => {
  vi.spyOn(HTMLCanvasElement.prototype, "getContext").mockReturnValue(null);
  server = await startServer();
  const root = document.createElement("div");
  document.body.append(root);
  mounted = mountConsole(root, { wsUrl: server.wsUrl, httpBase: server.httpBase });
}, 60_000);

afterAll(async () => {
  mounted?.session.stop();
  await server?.stop();
});

describe("console against a live server", () => {
  it("runs DIVE 1.0 / FWD 30 / END from the UI", async () => {
    const model = mounted.session.model;

    await waitFor(() => !mounted.input.disabled, 30_000, "input enabled on banner");
    expect(mounted.linkBadge.textContent).toBe("connected");

    type("DIVE 1.0");
    await waitFor(() => ackedLines().length === 1, 30_000, "dive ack in history");
    expect(ackedLines()[0]).toContain("DIVE 1.0");

    await waitFor(() => model.link.kind === "dropped", 30_000, "drop during dive");
    expect(mounted.linkBadge.textContent).toContain("dropped:submerged");
    expect(mounted.input.disabled).toBe(true);

    await waitFor(() => !mounted.input.disabled, 45_000, "resurface reconnect");
    type("FWD 30");
    await waitFor(() => ackedLines().length === 2, 30_000, "fwd ack in history");

    await waitFor(() => model.link.kind === "dropped", 30_000, "drop during cruise");
    expect(mounted.input.disabled).toBe(true);
    await waitFor(() => !mounted.input.disabled, 60_000, "second resurface");

    // live chart data: one segment per link session, gap where the dives were
    await waitFor(() => model.depth.length >= 3 && model.depth[2].length > 0, 30_000, "third segment");
    for (const p of model.depth.flat()) expect(p.v).toBeLessThanOrEqual(0.25 + 1e-9);

    // the recorded profile supplies the in-band cruise for the chart overlay
    await mounted.loadProfile();
    const profile = model.profile;
    expect(profile).not.toBeNull();
    expect(profile!.summary!.max_sensed_depth_m).toBeGreaterThan(0.95);
    expect(profile!.depth_profile.filter(([, d]) => d >= 0.95 && d <= 1.45).length).toBeGreaterThan(10);

    type("END");
    await waitFor(() => ackedLines().length === 3, 30_000, "end ack in history");
    await waitFor(() => model.ended, 30_000, "terminal state");
    expect(mounted.linkBadge.textContent).toBe("dropped:ended");
    expect(mounted.input.disabled).toBe(true);
  });
});
