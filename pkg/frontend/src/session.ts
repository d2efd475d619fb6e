// Console session state. Everything the UI shows lives in SessionModel and
// changes only through apply(event), so a recorded event list can be
// replayed into an identical model (the replay tests rely on this).
// ConsoleSession is the transport shell: it turns a WebSocket plus retry
// timers into that event stream.

import { parseFrame, type BannerInfo, type ProfileData, type TelemetryFrame } from "./protocol";

export type DropReason = "submerged" | "ended" | "busy" | "server";

export type LinkView =
  | { kind: "idle" }
  | { kind: "connecting"; attempt: number }
  | { kind: "connected" }
  | { kind: "dropped"; reason: DropReason; retryInMs: number | null; attempt: number };

export interface CommandEntry {
  line: string;
  status: "pending" | "ack" | "error";
  response: string | null;
}

export interface SeriesPoint {
  t: number;
  v: number;
}

// One segment per link session; gaps between segments are the submerged
// stretches and must render as gaps, never as connecting lines.
export type Segments = SeriesPoint[][];

export type SessionEvent =
  | { type: "connecting"; attempt: number }
  | { type: "open" }
  | { type: "message"; text: string }
  | { type: "closed"; code: number | null }
  | { type: "retry-scheduled"; delayMs: number }
  | { type: "send"; line: string }
  | { type: "blocked"; line: string };

export function linkLabel(link: LinkView): string {
  switch (link.kind) {
    case "idle":
      return "idle";
    case "connecting":
      return `connecting#${link.attempt}`;
    case "connected":
      return "connected";
    case "dropped":
      return link.retryInMs === null
        ? `dropped:${link.reason}`
        : `dropped:${link.reason}(retry ${link.retryInMs}ms)`;
  }
}

export class SessionModel {
  link: LinkView = { kind: "idle" };
  linkLog: string[] = [];
  banner: BannerInfo | null = null;
  phase = "";
  history: CommandEntry[] = [];
  depth: Segments = [];
  heading: Segments = [];
  track: { x: number; y: number }[] = [];
  lastFrame: TelemetryFrame | null = null;
  profile: ProfileData | null = null;
  badFrames = 0;
  notice: string | null = null;

  private freshSession = false;
  private endAcked = false;

  get canSend(): boolean {
    return this.link.kind === "connected";
  }

  get ended(): boolean {
    return this.link.kind === "dropped" && this.link.reason === "ended";
  }

  apply(ev: SessionEvent): void {
    switch (ev.type) {
      case "connecting":
        this.setLink({ kind: "connecting", attempt: ev.attempt });
        break;
      case "open":
        // socket is up but the vehicle has not admitted us yet (it may be
        // submerged and holding us parked); only the banner means connected
        break;
      case "message":
        this.onMessage(ev.text);
        break;
      case "closed":
        this.onClosed(ev.code);
        break;
      case "retry-scheduled":
        if (this.link.kind === "dropped") {
          this.setLink({ ...this.link, retryInMs: ev.delayMs });
        }
        break;
      case "send":
        this.history.push({ line: ev.line, status: "pending", response: null });
        this.notice = null;
        break;
      case "blocked":
        this.notice = `vehicle submerged: "${ev.line}" not sent`;
        break;
    }
  }

  loadProfile(data: ProfileData): void {
    this.profile = data;
  }

  private onMessage(text: string): void {
    const frame = parseFrame(text);
    if (frame === null) {
      this.badFrames += 1;
      return;
    }
    switch (frame.kind) {
      case "banner":
        this.banner = frame.banner;
        this.phase = frame.banner.phase;
        this.freshSession = true;
        this.notice = null;
        this.setLink({ kind: "connected" });
        break;
      case "ack": {
        const entry = this.oldestPending();
        if (entry) {
          entry.status = "ack";
          entry.response = frame.line;
          if (frame.line.trim().toUpperCase() === "END") this.endAcked = true;
        }
        break;
      }
      case "error": {
        const entry = this.oldestPending();
        if (entry) {
          entry.status = "error";
          entry.response = frame.reason;
        }
        break;
      }
      case "telemetry": {
        const f = frame.frame;
        if (this.freshSession || this.depth.length === 0) {
          this.depth.push([]);
          this.heading.push([]);
          this.freshSession = false;
        }
        this.depth[this.depth.length - 1].push({ t: f.t, v: f.depth });
        this.heading[this.heading.length - 1].push({ t: f.t, v: f.heading });
        this.track.push({ x: f.float_x, y: f.float_y });
        this.phase = f.phase;
        this.lastFrame = f;
        break;
      }
    }
  }

  private onClosed(code: number | null): void {
    // a pending command may have been in flight when the water closed the
    // link; by protocol it was never delivered
    for (const entry of this.history) {
      if (entry.status === "pending") {
        entry.status = "error";
        entry.response = "link dropped before acknowledgement";
      }
    }
    let reason: DropReason;
    if (this.endAcked) reason = "ended";
    else if (this.link.kind === "connected") reason = "submerged";
    else if (code === 1013) reason = "busy";
    else reason = "server";
    this.setLink({ kind: "dropped", reason, retryInMs: null, attempt: 0 });
  }

  private oldestPending(): CommandEntry | undefined {
    return this.history.find((e) => e.status === "pending");
  }

  private setLink(link: LinkView): void {
    this.link = link;
    this.linkLog.push(linkLabel(link));
  }
}

export function replay(events: SessionEvent[]): SessionModel {
  const model = new SessionModel();
  for (const ev of events) model.apply(ev);
  return model;
}

// ---------------------------------------------------------------- transport

export interface WsLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: { code?: number }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type WsFactory = (url: string) => WsLike;

export interface SessionOptions {
  wsFactory?: WsFactory;
  setTimer?: (fn: () => void, ms: number) => void;
  onChange?: () => void;
  recorder?: (ev: SessionEvent) => void;
  baseRetryMs?: number;
  maxRetryMs?: number;
}

export class ConsoleSession {
  readonly model = new SessionModel();
  private ws: WsLike | null = null;
  private attempt = 0;
  private stopped = false;

  constructor(private readonly url: string, private readonly opts: SessionOptions = {}) {}

  start(): void {
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.ws?.close();
    this.ws = null;
  }

  send(line: string): boolean {
    const text = line.trim();
    if (!text) return false;
    if (!this.model.canSend || this.ws === null) {
      this.dispatch({ type: "blocked", line: text });
      return false;
    }
    this.ws.send(text);
    this.dispatch({ type: "send", line: text });
    return true;
  }

  private connect(): void {
    this.attempt += 1;
    this.dispatch({ type: "connecting", attempt: this.attempt });
    const factory: WsFactory = this.opts.wsFactory ?? ((u) => new WebSocket(u) as unknown as WsLike);
    let ws: WsLike;
    try {
      ws = factory(this.url);
    } catch {
      this.dispatch({ type: "closed", code: null });
      this.scheduleRetry();
      return;
    }
    this.ws = ws;
    ws.onopen = () => this.dispatch({ type: "open" });
    ws.onmessage = (ev) => {
      this.dispatch({ type: "message", text: String(ev.data) });
      if (this.model.link.kind === "connected") this.attempt = 0;
    };
    ws.onerror = () => {
      // the close event that follows carries the state change
    };
    ws.onclose = (ev) => {
      if (this.ws !== ws) return; // superseded by a newer attempt
      this.ws = null;
      this.dispatch({ type: "closed", code: ev?.code ?? null });
      this.scheduleRetry();
    };
  }

  private scheduleRetry(): void {
    if (this.stopped || this.model.ended) return;
    const base = this.opts.baseRetryMs ?? 500;
    const cap = this.opts.maxRetryMs ?? 5000;
    const delay = Math.min(base * 2 ** Math.min(Math.max(this.attempt - 1, 0), 6), cap);
    this.dispatch({ type: "retry-scheduled", delayMs: delay });
    const timer = this.opts.setTimer ?? ((fn, ms) => void setTimeout(fn, ms));
    timer(() => {
      if (!this.stopped && !this.model.ended) this.connect();
    }, delay);
  }

  private dispatch(ev: SessionEvent): void {
    this.opts.recorder?.(ev);
    this.model.apply(ev);
    this.opts.onChange?.();
  }
}
