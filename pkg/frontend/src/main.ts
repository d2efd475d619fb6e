// Entry point and DOM wiring. mountConsole builds the page inside a root
// element and re-renders from the session model on every change; the tests
// mount it against a fake socket factory, the browser build against the
// real WebSocket.

import { parseProfile } from "./protocol";
import { drawDepthChart, drawHeadingDial, drawTrackMap } from "./instruments";
import { ConsoleSession, linkLabel, type SessionOptions } from "./session";

export interface ConsoleConfig {
  wsUrl: string;
  httpBase: string;
}

export function urlConfig(search: string): ConsoleConfig {
  const params = new URLSearchParams(search);
  return {
    wsUrl: params.get("ws") ?? "ws://127.0.0.1:7071",
    httpBase: params.get("http") ?? "http://127.0.0.1:7072",
  };
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface MountedConsole {
  session: ConsoleSession;
  render: () => void;
  input: HTMLInputElement;
  sendButton: HTMLButtonElement;
  linkBadge: HTMLElement;
  notice: HTMLElement;
  historyList: HTMLElement;
  statusLine: HTMLElement;
  profileButton: HTMLButtonElement;
  loadProfile: () => Promise<void>;
}

export function mountConsole(
  root: HTMLElement,
  config: ConsoleConfig,
  opts: SessionOptions = {},
  fetchFn: typeof fetch = fetch,
): MountedConsole {
  root.innerHTML = "";

  const header = el("header");
  const title = el("h1", undefined, "AUV console");
  const linkBadge = el("span", "link-badge");
  const phaseLabel = el("span", "phase");
  header.append(title, linkBadge, phaseLabel);

  const commandRow = el("div", "command-row");
  const input = el("input");
  input.type = "text";
  input.placeholder = "DIVE 1.0 / FWD 30 / SURFACE / PING / END";
  const sendButton = el("button", undefined, "Send");
  const profileButton = el("button", undefined, "Load profile");
  commandRow.append(input, sendButton, profileButton);

  const notice = el("div", "notice");
  const statusLine = el("div", "status-line");

  const charts = el("div", "charts");
  const depthCanvas = el("canvas", "depth");
  depthCanvas.width = 560;
  depthCanvas.height = 220;
  const dialCanvas = el("canvas", "dial");
  dialCanvas.width = 140;
  dialCanvas.height = 140;
  const mapCanvas = el("canvas", "map");
  mapCanvas.width = 300;
  mapCanvas.height = 220;
  charts.append(depthCanvas, dialCanvas, mapCanvas);

  const historyList = el("ul", "history");

  root.append(header, commandRow, notice, statusLine, charts, historyList);

  const session = new ConsoleSession(config.wsUrl, { ...opts, onChange: () => render() });
  const model = session.model;

  function render(): void {
    const label = linkLabel(model.link);
    linkBadge.textContent = label;
    linkBadge.dataset.kind = model.link.kind;
    phaseLabel.textContent = model.phase ? `phase ${model.phase}` : "";
    input.disabled = !model.canSend;
    sendButton.disabled = !model.canSend;
    notice.textContent = model.notice ?? "";

    const f = model.lastFrame;
    statusLine.textContent = f
      ? `t ${f.t.toFixed(1)}s  depth ${f.depth.toFixed(2)}m  pitch ${f.pitch.toFixed(1)}°` +
        `  heading ${f.heading.toFixed(1)}°  pos ${f.x.toFixed(1)},${f.y.toFixed(1)}`
      : "no telemetry yet";

    historyList.innerHTML = "";
    for (const entry of model.history) {
      const item = el("li", `cmd-${entry.status}`);
      const tail = entry.status === "pending" ? "…" : ` ${entry.response ?? ""}`;
      item.textContent = `> ${entry.line}${tail}`;
      historyList.append(item);
    }

    const band: [number, number] = bandFromConfig();
    const depthCtx = depthCanvas.getContext("2d");
    if (depthCtx) drawDepthChart(depthCtx, depthCanvas.width, depthCanvas.height, model.depth, band, model.profile);
    const dialCtx = dialCanvas.getContext("2d");
    if (dialCtx) drawHeadingDial(dialCtx, dialCanvas.width, f ? f.heading : null);
    const mapCtx = mapCanvas.getContext("2d");
    if (mapCtx) drawTrackMap(mapCtx, mapCanvas.width, mapCanvas.height, model.track, model.profile);

    opts.onChange?.();
  }

  function bandFromConfig(): [number, number] {
    const cfg = model.banner?.config;
    const target = num(cfg?.["target_depth_m"], 1.0);
    const halfBand = num(cfg?.["depth_band_m"], 0.25);
    const offset = num(cfg?.["sensor_mount_offset_m"], 0.2);
    return [target + offset - halfBand, target + offset + halfBand];
  }

  async function loadProfile(): Promise<void> {
    try {
      const res = await fetchFn(`${config.httpBase}/profile`);
      const data = parseProfile(await res.json());
      if (data) {
        model.loadProfile(data);
        render();
      }
    } catch {
      model.notice = "profile fetch failed";
      render();
    }
  }

  const submit = () => {
    const line = input.value;
    if (session.send(line)) input.value = "";
    render();
  };
  sendButton.addEventListener("click", submit);
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") submit();
  });
  profileButton.addEventListener("click", () => void loadProfile());

  render();
  session.start();

  return {
    session,
    render,
    input,
    sendButton,
    linkBadge,
    notice,
    historyList,
    statusLine,
    profileButton,
    loadProfile,
  };
}

function num(v: unknown, fallback: number): number {
  return typeof v === "number" && Number.isFinite(v) ? v : fallback;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const root = document.getElementById("app") as HTMLElement;
  mountConsole(root, urlConfig(window.location.search));
}
