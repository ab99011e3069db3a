/**
 * PlotSpec resolution and rendering.
 *
 * A PlotSpec lists trace files with optional labels, line styles, and
 * color groups, plus the output path and axis scales.  `render` reads and
 * validates everything first and writes the output file only after every
 * check has passed, so a failed render never leaves a file behind.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { buildFigure, type CurveInput, type LineStyle, type Scale, type Scene } from "./scene.js";
import { encodePng } from "./png.js";
import { rasterize } from "./raster.js";
import { sceneToSvg } from "./svg.js";
import { defaultLabel, parseTraceText, type Trace } from "./trace.js";

export class UsageError extends Error {
  constructor(msg: string) {
    super(msg);
    this.name = "UsageError";
  }
}

export interface PlotEntry {
  path: string;
  /** Legend label; null derives "d, n×m" from the trace metadata. */
  label: string | null;
  style: LineStyle;
  /** Curves sharing a group share a color; null assigns by pairing. */
  colorGroup: number | null;
}

export interface PlotSpec {
  entries: PlotEntry[];
  out: string;
  xScale?: Scale;
  yScale?: Scale;
  width?: number;
  height?: number;
}

export interface RenderResult {
  out: string;
  curves: number;
  bytes: number;
}

function readTrace(file: string): Trace {
  let text: string;
  try {
    text = fs.readFileSync(file, "utf8");
  } catch (err) {
    const detail = err instanceof Error ? err.message : String(err);
    throw new UsageError(`cannot read ${file}: ${detail}`);
  }
  return parseTraceText(file, text);
}

/**
 * Resolve legend labels: explicit labels are taken as-is and must be
 * unique; derived labels that collide (e.g. the two halves of an oracle
 * comparison, which share d, n, m) are disambiguated with the oracle kind
 * and, failing that, a positional suffix.
 */
export function resolveLabels(entries: readonly PlotEntry[], traces: readonly Trace[]): string[] {
  const labels = entries.map((e, i) => {
    if (e.label !== null) return e.label;
    const derived = defaultLabel(traces[i]!);
    return derived !== "" ? derived : path.basename(e.path).replace(/\.csv$/i, "");
  });

  const explicit = new Map<string, number>();
  entries.forEach((e, i) => {
    if (e.label === null) return;
    const first = explicit.get(labels[i]!);
    if (first !== undefined) {
      throw new UsageError(`duplicate label "${labels[i]}" (entries ${first + 1} and ${i + 1})`);
    }
    explicit.set(labels[i]!, i);
  });

  const counts = new Map<string, number>();
  for (const l of labels) counts.set(l, (counts.get(l) ?? 0) + 1);
  const seen = new Map<string, number>();
  return labels.map((label, i) => {
    if (counts.get(label)! <= 1) return label;
    if (entries[i]!.label !== null) return label; // explicit ones are already unique
    const kind = traces[i]!.meta["oracle"];
    const withKind = kind !== undefined ? `${label} (${kind})` : label;
    if (withKind !== label && (counts.get(withKind) ?? 0) === 0 && !seen.has(withKind)) {
      seen.set(withKind, 1);
      return withKind;
    }
    const k = (seen.get(label) ?? 0) + 1;
    seen.set(label, k);
    return `${label} #${k}`;
  });
}

/**
 * Assign color groups by the pairing convention: each solid curve opens a
 * new group; a dashed curve joins the most recent solid curve's group, so
 * the two halves of a comparison share a color.  Explicit group indices
 * are kept untouched.
 */
export function resolveColorGroups(entries: readonly PlotEntry[]): number[] {
  let next = 0;
  let lastSolid: number | null = null;
  return entries.map((e) => {
    if (e.colorGroup !== null) {
      next = Math.max(next, e.colorGroup + 1);
      if (e.style === "solid") lastSolid = e.colorGroup;
      return e.colorGroup;
    }
    if (e.style === "solid") {
      lastSolid = next;
      return next++;
    }
    if (lastSolid !== null) return lastSolid;
    return next++;
  });
}

export function buildScene(spec: PlotSpec): Scene {
  if (spec.entries.length === 0) {
    throw new UsageError("no trace files given");
  }
  const traces = spec.entries.map((e) => readTrace(e.path));
  traces.forEach((t, i) => {
    if (t.rows.length === 0) {
      throw new UsageError(`${spec.entries[i]!.path}: trace contains no checkpoint rows`);
    }
  });
  const labels = resolveLabels(spec.entries, traces);
  const groups = resolveColorGroups(spec.entries);

  const curves: CurveInput[] = traces.map((t, i) => ({
    label: labels[i]!,
    style: spec.entries[i]!.style,
    colorGroup: groups[i]!,
    points: t.rows.map((r) => [r.iter, r.deltaK] as const),
  }));

  return buildFigure(curves, {
    width: spec.width ?? 640,
    height: spec.height ?? 420,
    xScale: spec.xScale ?? "log",
    yScale: spec.yScale ?? "log",
  });
}

/** Render the figure and write it; the format follows the file extension. */
export function render(spec: PlotSpec): RenderResult {
  const ext = path.extname(spec.out).toLowerCase();
  if (ext !== ".png" && ext !== ".svg") {
    throw new UsageError(`output path must end in .png or .svg, got ${spec.out || "(empty)"}`);
  }
  const scene = buildScene(spec);
  let bytes: Uint8Array;
  if (ext === ".svg") {
    bytes = new TextEncoder().encode(sceneToSvg(scene));
  } else {
    const raster = rasterize(scene);
    bytes = encodePng(raster.width, raster.height, raster.pixels);
  }
  try {
    fs.writeFileSync(spec.out, bytes);
  } catch (err) {
    const detail = err instanceof Error ? err.message : String(err);
    throw new UsageError(`cannot write ${spec.out}: ${detail}`);
  }
  return { out: spec.out, curves: spec.entries.length, bytes: bytes.length };
}
