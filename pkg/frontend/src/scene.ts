/**
 * Figure construction shared by the SVG and PNG backends.
 *
 * A figure is reduced to a flat list of drawing primitives in pixel
 * coordinates (y growing downward).  All layout decisions live here, so a
 * backend only has to draw rectangles, polylines, and bitmap-font text.
 */

import { ADVANCE } from "./font.js";

export type Scale = "linear" | "log";
export type LineStyle = "solid" | "dashed";

export interface CurveInput {
  label: string;
  style: LineStyle;
  /** Curves with the same group index share a color. */
  colorGroup: number;
  /** Data coordinates: iteration (>= 1) and relative accuracy (>= 0). */
  points: ReadonlyArray<readonly [number, number]>;
}

export type Primitive =
  | { kind: "rect"; x: number; y: number; w: number; h: number; color: string }
  | {
      kind: "polyline";
      points: ReadonlyArray<readonly [number, number]>;
      color: string;
      width: number;
      dash: readonly number[] | null;
    }
  | {
      kind: "text";
      x: number;
      y: number;
      text: string;
      /** Integer bitmap-font scale; glyphs are 5x7 at scale 1. */
      scale: number;
      color: string;
      anchor: "start" | "middle" | "end";
      /** Rotated 90° counterclockwise (for the y-axis label). */
      rotated: boolean;
    };

export interface Scene {
  width: number;
  height: number;
  primitives: Primitive[];
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#e377c2",
  "#17becf",
] as const;

export const X_AXIS_LABEL = "iteration k";
export const Y_AXIS_LABEL = "relative accuracy";

/** Above this many rows a curve is thinned before plotting. */
export const DECIMATION_CAP = 10_000;

const DASH_PATTERN = [6, 4] as const;
const FG = "#333333";
const GRID = "#e6e6e6";
const BG = "#ffffff";
const FONT_SCALE = 2;
const GLYPH_HEIGHT = 7;

/**
 * Indices kept when a curve of `n` points exceeds `cap`: a geometric grid
 * over positions 1..n, deduplicated, always containing the first and last
 * index.  For n <= cap every index is kept, in order.
 */
export function decimateIndices(n: number, cap: number = DECIMATION_CAP): number[] {
  if (n < 0 || !Number.isInteger(n)) throw new Error(`invalid point count ${n}`);
  if (n <= cap) return Array.from({ length: n }, (_, i) => i);
  const out: number[] = [];
  let prev = -1;
  for (let i = 0; i < cap; i++) {
    const pos = Math.pow(n, i / (cap - 1)); // in [1, n]
    const idx = Math.min(n - 1, Math.round(pos) - 1);
    if (idx > prev) {
      out.push(idx);
      prev = idx;
    }
  }
  if (out[out.length - 1] !== n - 1) out.push(n - 1);
  return out;
}

export interface Tick {
  value: number;
  label: string;
}

/** Decimal label for m * 10^j without float formatting artifacts. */
function tickLabel(m: number, j: number): string {
  if (j >= 0 && j <= 3) return String(m * 10 ** j);
  if (j >= -3) return (m * 10 ** j).toFixed(-j);
  return `${m}e${j}`;
}

/**
 * Ticks for a log axis over [lo, hi] (both > 0): powers of ten inside the
 * range; when fewer than two fit, mantissas 1, 2, 5 per decade are used.
 */
export function logTicks(lo: number, hi: number): Tick[] {
  const jLo = Math.ceil(Math.log10(lo) - 1e-9);
  const jHi = Math.floor(Math.log10(hi) + 1e-9);
  const decades: Tick[] = [];
  for (let j = jLo; j <= jHi; j++) {
    decades.push({ value: 10 ** j, label: tickLabel(1, j) });
  }
  if (decades.length >= 2) return decades;
  const ticks: Tick[] = [];
  for (let j = Math.floor(Math.log10(lo) + 1e-9); j <= jHi + 1; j++) {
    for (const m of [1, 2, 5]) {
      const v = m * 10 ** j;
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) {
        ticks.push({ value: v, label: tickLabel(m, j) });
      }
    }
  }
  return ticks;
}

/** Ticks for a linear axis: steps of 1, 2, or 5 times a power of ten. */
export function linearTicks(lo: number, hi: number, count = 5): Tick[] {
  const range = hi - lo || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const decimals = Math.max(0, -Math.floor(Math.log10(step) + 1e-9));
  const ticks: Tick[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-6; v += step) {
    ticks.push({ value: v, label: v.toFixed(decimals) });
  }
  return ticks;
}

interface Mapper {
  (v: number): number;
}

function makeMapper(scale: Scale, lo: number, hi: number, p0: number, p1: number): Mapper {
  if (scale === "log") {
    const a = Math.log(lo);
    const b = Math.log(hi);
    const span = b - a || 1;
    return (v) => p0 + ((Math.log(v) - a) / span) * (p1 - p0);
  }
  const span = hi - lo || 1;
  return (v) => p0 + ((v - lo) / span) * (p1 - p0);
}

/**
 * Display floor for accuracy values on a log axis: exact zeros (a run that
 * hit its optimum) cannot be placed at -infinity, so they are drawn one
 * decade below the smallest positive value in the figure (or at 1e-16 when
 * every value is zero).  Data values are not modified anywhere else.
 */
export function displayFloor(values: number[]): number {
  let minPos = Infinity;
  for (const v of values) {
    if (v > 0 && v < minPos) minPos = v;
  }
  return Number.isFinite(minPos) ? minPos / 10 : 1e-16;
}

function dataRange(values: number[], scale: Scale): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) throw new Error("no finite data to plot");
  if (lo === hi) {
    if (scale === "log") return [lo / 10, hi * 10];
    return [lo - 1, hi + 1];
  }
  return [lo, hi];
}

/** Pad a range by 5% of its extent (multiplicative on a log scale). */
function padRange(lo: number, hi: number, scale: Scale): [number, number] {
  if (scale === "log") {
    const f = Math.pow(hi / lo, 0.05);
    return [lo / f, hi * f];
  }
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

export interface FigureOptions {
  width: number;
  height: number;
  xScale: Scale;
  yScale: Scale;
}

/**
 * Lay out the full convergence figure: frame, grid, ticks, axis labels
 * ("iteration k" / "relative accuracy"), the curves, and a legend.
 */
export function buildFigure(curves: readonly CurveInput[], opts: FigureOptions): Scene {
  if (curves.length === 0) throw new Error("no curves to plot");
  for (const c of curves) {
    if (c.points.length === 0) throw new Error(`curve "${c.label}" has no points`);
  }

  const { width, height, xScale, yScale } = opts;
  const ml = 74;
  const mr = 14;
  const mt = 14;
  const mb = 46;
  const pw = width - ml - mr;
  const ph = height - mt - mb;
  if (pw < 40 || ph < 40) throw new Error(`figure size ${width}x${height} too small`);

  const xs = curves.flatMap((c) => c.points.map((p) => p[0]));
  const rawYs = curves.flatMap((c) => c.points.map((p) => p[1]));
  const floor = yScale === "log" ? displayFloor(rawYs) : -Infinity;
  const ys = rawYs.map((v) => Math.max(v, floor));

  const [xLoRaw, xHiRaw] = dataRange(xs, xScale);
  const [yLoRaw, yHiRaw] = dataRange(ys, yScale);
  const [xLo, xHi] = [xLoRaw, xHiRaw]; // iterations span edge to edge
  const [yLo, yHi] = padRange(yLoRaw, yHiRaw, yScale);

  const xOf = makeMapper(xScale, xLo, xHi, ml, ml + pw);
  const yOf = makeMapper(yScale, yLo, yHi, mt + ph, mt); // inverted: up is larger

  const prims: Primitive[] = [];
  prims.push({ kind: "rect", x: 0, y: 0, w: width, h: height, color: BG });

  const xTicks = (xScale === "log" ? logTicks(xLo, xHi) : linearTicks(xLo, xHi)).filter(
    (t) => t.value >= xLo * (1 - 1e-9) && t.value <= xHi * (1 + 1e-9),
  );
  const yTicks = (yScale === "log" ? logTicks(yLo, yHi) : linearTicks(yLo, yHi)).filter(
    (t) => t.value >= yLo * (1 - 1e-9) && t.value <= yHi * (1 + 1e-9),
  );

  // Grid under everything else.
  for (const t of xTicks) {
    const x = xOf(t.value);
    prims.push({ kind: "polyline", points: [[x, mt], [x, mt + ph]], color: GRID, width: 1, dash: null });
  }
  for (const t of yTicks) {
    const y = yOf(t.value);
    prims.push({ kind: "polyline", points: [[ml, y], [ml + pw, y]], color: GRID, width: 1, dash: null });
  }

  // Frame.
  prims.push({
    kind: "polyline",
    points: [[ml, mt], [ml + pw, mt], [ml + pw, mt + ph], [ml, mt + ph], [ml, mt]],
    color: FG,
    width: 1,
    dash: null,
  });

  // Ticks and tick labels.
  const tickLen = 4;
  for (const t of xTicks) {
    const x = xOf(t.value);
    prims.push({ kind: "polyline", points: [[x, mt + ph], [x, mt + ph + tickLen]], color: FG, width: 1, dash: null });
    prims.push({
      kind: "text",
      x,
      y: mt + ph + tickLen + 4 + GLYPH_HEIGHT * FONT_SCALE,
      text: t.label,
      scale: FONT_SCALE,
      color: FG,
      anchor: "middle",
      rotated: false,
    });
  }
  for (const t of yTicks) {
    const y = yOf(t.value);
    prims.push({ kind: "polyline", points: [[ml - tickLen, y], [ml, y]], color: FG, width: 1, dash: null });
    prims.push({
      kind: "text",
      x: ml - tickLen - 4,
      y: y + (GLYPH_HEIGHT * FONT_SCALE) / 2,
      text: t.label,
      scale: FONT_SCALE,
      color: FG,
      anchor: "end",
      rotated: false,
    });
  }

  // Axis labels.
  prims.push({
    kind: "text",
    x: ml + pw / 2,
    y: height - 8,
    text: X_AXIS_LABEL,
    scale: FONT_SCALE,
    color: FG,
    anchor: "middle",
    rotated: false,
  });
  prims.push({
    kind: "text",
    x: 8 + GLYPH_HEIGHT * FONT_SCALE,
    y: mt + ph / 2,
    text: Y_AXIS_LABEL,
    scale: FONT_SCALE,
    color: FG,
    anchor: "middle",
    rotated: true,
  });

  // Curves (decimated when oversized), clamped to the display floor.
  for (const c of curves) {
    const keep = decimateIndices(c.points.length);
    const pts: [number, number][] = keep.map((i) => {
      const p = c.points[i]!;
      return [xOf(p[0]), yOf(Math.max(p[1], floor))];
    });
    prims.push({
      kind: "polyline",
      points: pts,
      color: PALETTE[c.colorGroup % PALETTE.length]!,
      width: 2,
      dash: c.style === "dashed" ? DASH_PATTERN : null,
    });
  }

  // Legend, top-right inside the frame.
  const swatch = 22;
  const entryH = 18;
  const inset = 8;
  const labelW = Math.max(...curves.map((c) => c.label.length)) * ADVANCE * FONT_SCALE;
  const legendW = swatch + 6 + labelW;
  const lx = ml + pw - inset - legendW;
  let ly = mt + inset;
  for (const c of curves) {
    const cy = ly + entryH / 2;
    prims.push({
      kind: "polyline",
      points: [[lx, cy], [lx + swatch, cy]],
      color: PALETTE[c.colorGroup % PALETTE.length]!,
      width: 2,
      dash: c.style === "dashed" ? DASH_PATTERN : null,
    });
    prims.push({
      kind: "text",
      x: lx + swatch + 6,
      y: cy + (GLYPH_HEIGHT * FONT_SCALE) / 2,
      text: c.label,
      scale: FONT_SCALE,
      color: FG,
      anchor: "start",
      rotated: false,
    });
    ly += entryH;
  }

  return { width, height, primitives: prims };
}
