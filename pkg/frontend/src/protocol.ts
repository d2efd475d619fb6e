// Frame schema shared with the vehicle server. One WebSocket text message
// carries one JSON object; anything that does not match a known shape is
// dropped and counted, never thrown.

export interface TelemetryFrame {
  t: number;
  depth: number; // sensed depth, meters (surfaced hull reads about 0.2)
  pitch: number;
  heading: number;
  phase: string;
  link: string;
  x: number;
  y: number;
  float_x: number;
  float_y: number;
  tags: string[];
}

export interface BannerInfo {
  phase: string;
  t: number;
  config: Record<string, number>;
}

export type ServerFrame =
  | { kind: "banner"; banner: BannerInfo }
  | { kind: "ack"; line: string }
  | { kind: "error"; reason: string }
  | { kind: "telemetry"; frame: TelemetryFrame };

const num = (v: unknown): v is number => typeof v === "number" && Number.isFinite(v);
const str = (v: unknown): v is string => typeof v === "string";

export function parseFrame(text: string): ServerFrame | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) return null;
  const obj = raw as Record<string, unknown>;

  if (str(obj.ack)) return { kind: "ack", line: obj.ack };
  if (str(obj.error)) return { kind: "error", reason: obj.error };

  if (typeof obj.banner === "object" && obj.banner !== null) {
    const b = obj.banner as Record<string, unknown>;
    if (str(b.phase) && num(b.t) && typeof b.config === "object" && b.config !== null) {
      return { kind: "banner", banner: { phase: b.phase, t: b.t, config: b.config as Record<string, number> } };
    }
    return null;
  }

  if (
    num(obj.t) && num(obj.depth) && num(obj.pitch) && num(obj.heading) &&
    str(obj.phase) && str(obj.link) &&
    num(obj.x) && num(obj.y) && num(obj.float_x) && num(obj.float_y) &&
    Array.isArray(obj.tags) && obj.tags.every(str)
  ) {
    return {
      kind: "telemetry",
      frame: {
        t: obj.t, depth: obj.depth, pitch: obj.pitch, heading: obj.heading,
        phase: obj.phase, link: obj.link,
        x: obj.x, y: obj.y, float_x: obj.float_x, float_y: obj.float_y,
        tags: obj.tags as string[],
      },
    };
  }
  return null;
}

// Mission profile as served by GET /profile (and `analyze`): the recorded
// log, which is the only place the submerged part of a dive is visible.
export interface ProfileData {
  summary: {
    time_to_band_s: number | null;
    max_sensed_depth_m: number;
    in_band_fraction: number;
    track_length_m: number;
    duration_s: number;
  } | null;
  depth_profile: [number, number][];
  track: [number, number][];
}

export function parseProfile(raw: unknown): ProfileData | null {
  if (typeof raw !== "object" || raw === null) return null;
  const obj = raw as Record<string, unknown>;
  const pair = (v: unknown): v is [number, number] =>
    Array.isArray(v) && v.length === 2 && num(v[0]) && num(v[1]);
  if (!Array.isArray(obj.depth_profile) || !obj.depth_profile.every(pair)) return null;
  if (!Array.isArray(obj.track) || !obj.track.every(pair)) return null;
  return {
    summary: (obj.summary as ProfileData["summary"]) ?? null,
    depth_profile: obj.depth_profile,
    track: obj.track,
  };
}

export function trackLength(points: [number, number][]): number {
  let total = 0;
  for (let i = 1; i < points.length; i++) {
    total += Math.hypot(points[i][0] - points[i - 1][0], points[i][1] - points[i - 1][1]);
  }
  return total;
}
