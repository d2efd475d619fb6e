// Canvas instruments: depth strip chart, heading dial, track map.
// The layout math is split out as pure functions so it can be tested
// without a canvas.

import { trackLength, type ProfileData } from "./protocol";
import type { Segments, SeriesPoint } from "./session";

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

export function seriesExtent(segments: Segments): [number, number] | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const seg of segments) {
    for (const p of seg) {
      if (p.t < lo) lo = p.t;
      if (p.t > hi) hi = p.t;
    }
  }
  return lo <= hi ? [lo, hi] : null;
}

export function valueExtent(segments: Segments): [number, number] | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const seg of segments) {
    for (const p of seg) {
      if (p.v < lo) lo = p.v;
      if (p.v > hi) hi = p.v;
    }
  }
  return lo <= hi ? [lo, hi] : null;
}

export function pointExtent(points: { x: number; y: number }[]): {
  x: [number, number];
  y: [number, number];
} | null {
  if (points.length === 0) return null;
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const p of points) {
    if (p.x < x0) x0 = p.x;
    if (p.x > x1) x1 = p.x;
    if (p.y < y0) y0 = p.y;
    if (p.y > y1) y1 = p.y;
  }
  return { x: [x0, x1], y: [y0, y1] };
}

function padExtent([lo, hi]: [number, number], frac = 0.08): [number, number] {
  const pad = (hi - lo || 1) * frac;
  return [lo - pad, hi + pad];
}

const COLORS = {
  grid: "#2a3442",
  axis: "#8899aa",
  band: "rgba(80, 160, 255, 0.15)",
  bandEdge: "rgba(80, 160, 255, 0.5)",
  live: "#4fc3f7",
  profile: "#ffb74d",
  track: "#81c784",
  needle: "#ef5350",
  text: "#cfd8dc",
};

function clear(ctx: CanvasRenderingContext2D, w: number, h: number): void {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#141a22";
  ctx.fillRect(0, 0, w, h);
}

function drawSegment(
  ctx: CanvasRenderingContext2D,
  points: SeriesPoint[],
  xs: Scale,
  ys: Scale,
): void {
  if (points.length === 0) return;
  ctx.beginPath();
  points.forEach((p, i) => {
    const x = xs(p.t);
    const y = ys(p.v);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
  if (points.length === 1) {
    const p = points[0];
    ctx.beginPath();
    ctx.arc(xs(p.t), ys(p.v), 2, 0, Math.PI * 2);
    ctx.fill();
  }
}

export function drawDepthChart(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  live: Segments,
  band: [number, number],
  profile: ProfileData | null,
): void {
  clear(ctx, w, h);
  const profilePts: SeriesPoint[] = (profile?.depth_profile ?? []).map(([t, d]) => ({ t, v: d }));
  const all: Segments = profilePts.length > 0 ? [...live, profilePts] : live;
  const tExt = seriesExtent(all) ?? [0, 60];
  const vRaw = valueExtent(all) ?? [0, band[1]];
  const vExt = padExtent([Math.min(0, vRaw[0]), Math.max(vRaw[1], band[1])]);
  const xs = linearScale(tExt, [40, w - 8]);
  const ys = linearScale(vExt, [8, h - 20]); // depth grows downward

  // target band
  ctx.fillStyle = COLORS.band;
  ctx.fillRect(40, ys(band[0]), w - 48, ys(band[1]) - ys(band[0]));
  ctx.strokeStyle = COLORS.bandEdge;
  ctx.lineWidth = 1;
  for (const edge of band) {
    ctx.beginPath();
    ctx.moveTo(40, ys(edge));
    ctx.lineTo(w - 8, ys(edge));
    ctx.stroke();
  }

  // recorded profile under the live trace
  if (profilePts.length > 0) {
    ctx.strokeStyle = COLORS.profile;
    ctx.fillStyle = COLORS.profile;
    ctx.lineWidth = 1;
    drawSegment(ctx, profilePts, xs, ys);
  }

  ctx.strokeStyle = COLORS.live;
  ctx.fillStyle = COLORS.live;
  ctx.lineWidth = 2;
  for (const seg of live) drawSegment(ctx, seg, xs, ys);

  ctx.fillStyle = COLORS.text;
  ctx.font = "10px sans-serif";
  ctx.fillText(`${vExt[0].toFixed(1)} m`, 2, ys(vExt[0]) + 3);
  ctx.fillText(`${vExt[1].toFixed(1)} m`, 2, ys(vExt[1]) - 2);
  ctx.fillText(`${tExt[0].toFixed(0)}s`, 40, h - 6);
  ctx.fillText(`${tExt[1].toFixed(0)}s`, w - 36, h - 6);
}

export function drawHeadingDial(
  ctx: CanvasRenderingContext2D,
  size: number,
  headingDeg: number | null,
): void {
  clear(ctx, size, size);
  const c = size / 2;
  const r = c - 10;
  ctx.strokeStyle = COLORS.axis;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.arc(c, c, r, 0, Math.PI * 2);
  ctx.stroke();
  ctx.fillStyle = COLORS.text;
  ctx.font = "10px sans-serif";
  ctx.textAlign = "center";
  const marks: [string, number][] = [["N", 0], ["E", 90], ["S", 180], ["W", 270]];
  for (const [label, deg] of marks) {
    const a = ((deg - 90) * Math.PI) / 180;
    ctx.fillText(label, c + (r - 9) * Math.cos(a), c + (r - 9) * Math.sin(a) + 3);
  }
  if (headingDeg !== null) {
    const a = ((headingDeg - 90) * Math.PI) / 180;
    ctx.strokeStyle = COLORS.needle;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(c, c);
    ctx.lineTo(c + (r - 14) * Math.cos(a), c + (r - 14) * Math.sin(a));
    ctx.stroke();
    ctx.fillStyle = COLORS.text;
    ctx.fillText(`${headingDeg.toFixed(0)}°`, c, size - 2);
  }
  ctx.textAlign = "start";
}

export function drawTrackMap(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  live: { x: number; y: number }[],
  profile: ProfileData | null,
): void {
  clear(ctx, w, h);
  const profilePts = (profile?.track ?? []).map(([x, y]) => ({ x, y }));
  const ext = pointExtent([...live, ...profilePts]);
  if (ext === null) {
    ctx.fillStyle = COLORS.axis;
    ctx.font = "11px sans-serif";
    ctx.fillText("no fixes yet", 10, h / 2);
    return;
  }
  const px = padExtent(ext.x, 0.12);
  const py = padExtent(ext.y, 0.12);
  // uniform meters per pixel so the path is not distorted
  const scale = Math.min((w - 20) / (px[1] - px[0]), (h - 20) / (py[1] - py[0]));
  const cx = (px[0] + px[1]) / 2;
  const cy = (py[0] + py[1]) / 2;
  const X = (x: number) => w / 2 + (x - cx) * scale;
  const Y = (y: number) => h / 2 - (y - cy) * scale;

  const trace = (pts: { x: number; y: number }[]) => {
    ctx.beginPath();
    pts.forEach((p, i) => (i === 0 ? ctx.moveTo(X(p.x), Y(p.y)) : ctx.lineTo(X(p.x), Y(p.y))));
    ctx.stroke();
  };
  if (profilePts.length > 1) {
    ctx.strokeStyle = COLORS.profile;
    ctx.lineWidth = 1;
    trace(profilePts);
  }
  if (live.length > 0) {
    ctx.strokeStyle = COLORS.track;
    ctx.lineWidth = 2;
    if (live.length > 1) trace(live);
    const last = live[live.length - 1];
    ctx.fillStyle = COLORS.track;
    ctx.beginPath();
    ctx.arc(X(last.x), Y(last.y), 3, 0, Math.PI * 2);
    ctx.fill();
  }
  const shown = profilePts.length > 1 ? profilePts : live;
  const length = trackLength(shown.map((p) => [p.x, p.y] as [number, number]));
  ctx.fillStyle = COLORS.text;
  ctx.font = "11px sans-serif";
  ctx.fillText(`track ${length.toFixed(1)} m`, 8, 14);
}
