/**
 * Raster backend: draws a scene into an RGB pixel buffer with integer
 * arithmetic only (Bresenham strokes, bitmap-font text), so the result is
 * exactly reproducible.
 */

import { ADVANCE, GLYPH_H, GLYPH_W, glyphRows, textWidth } from "./font.js";
import type { Scene } from "./scene.js";

export class Raster {
  readonly pixels: Uint8Array;

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.pixels = new Uint8Array(width * height * 3).fill(0xff);
  }

  set(x: number, y: number, rgb: readonly [number, number, number]): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const o = (y * this.width + x) * 3;
    this.pixels[o] = rgb[0];
    this.pixels[o + 1] = rgb[1];
    this.pixels[o + 2] = rgb[2];
  }
}

export function parseHexColor(hex: string): [number, number, number] {
  const m = /^#([0-9a-fA-F]{6})$/.exec(hex);
  if (!m) throw new Error(`bad color ${hex}`);
  const v = parseInt(m[1]!, 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

function fillRect(r: Raster, x: number, y: number, w: number, h: number, rgb: [number, number, number]): void {
  const x0 = Math.max(0, Math.round(x));
  const y0 = Math.max(0, Math.round(y));
  const x1 = Math.min(r.width, Math.round(x + w));
  const y1 = Math.min(r.height, Math.round(y + h));
  for (let yy = y0; yy < y1; yy++) {
    for (let xx = x0; xx < x1; xx++) r.set(xx, yy, rgb);
  }
}

/** Stamp a width x width square centered on (x, y). */
function stamp(r: Raster, x: number, y: number, width: number, rgb: [number, number, number]): void {
  const lo = -Math.floor((width - 1) / 2);
  const hi = Math.ceil((width - 1) / 2);
  for (let dy = lo; dy <= hi; dy++) {
    for (let dx = lo; dx <= hi; dx++) r.set(x + dx, y + dy, rgb);
  }
}

/**
 * Bresenham segment with an optional on/off dash pattern measured in
 * pixels of traversal.  `phase` carries the pattern position across the
 * segments of one polyline so dashes flow through corners.
 */
function drawSegment(
  r: Raster,
  x0f: number,
  y0f: number,
  x1f: number,
  y1f: number,
  width: number,
  rgb: [number, number, number],
  dash: readonly number[] | null,
  phase: number,
): number {
  let x0 = Math.round(x0f);
  let y0 = Math.round(y0f);
  const x1 = Math.round(x1f);
  const y1 = Math.round(y1f);
  const dx = Math.abs(x1 - x0);
  const sx = x0 < x1 ? 1 : -1;
  const dy = -Math.abs(y1 - y0);
  const sy = y0 < y1 ? 1 : -1;
  let err = dx + dy;
  const period = dash ? dash[0]! + dash[1]! : 0;
  let pos = phase;
  for (;;) {
    const on = !dash || pos % period < dash[0]!;
    if (on) stamp(r, x0, y0, width, rgb);
    if (x0 === x1 && y0 === y1) break;
    const e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
    pos += 1;
  }
  return dash ? pos % period : 0;
}

function drawPolyline(
  r: Raster,
  points: ReadonlyArray<readonly [number, number]>,
  width: number,
  rgb: [number, number, number],
  dash: readonly number[] | null,
): void {
  let phase = 0;
  for (let i = 1; i < points.length; i++) {
    const [x0, y0] = points[i - 1]!;
    const [x1, y1] = points[i]!;
    phase = drawSegment(r, x0, y0, x1, y1, width, rgb, dash, phase);
  }
  if (points.length === 1) {
    const [x, y] = points[0]!;
    stamp(r, Math.round(x), Math.round(y), width, rgb);
  }
}

/**
 * Stamp text whose anchor point (x, y) sits on the baseline; the glyph box
 * extends GLYPH_H * scale pixels above it.  Rotated text runs bottom-to-top.
 */
function drawText(
  r: Raster,
  x: number,
  y: number,
  text: string,
  scale: number,
  rgb: [number, number, number],
  anchor: "start" | "middle" | "end",
  rotated: boolean,
): void {
  const w = textWidth(text) * scale;
  let offset = 0;
  if (anchor === "middle") offset = -Math.round(w / 2);
  if (anchor === "end") offset = -w;

  const chars = Array.from(text);
  for (let ci = 0; ci < chars.length; ci++) {
    const rows = glyphRows(chars[ci]!);
    const base = offset + ci * ADVANCE * scale;
    for (let gr = 0; gr < GLYPH_H; gr++) {
      const mask = rows[gr]!;
      for (let gc = 0; gc < GLYPH_W; gc++) {
        if (!((mask >> (GLYPH_W - 1 - gc)) & 1)) continue;
        const lx = base + gc * scale; // along the text run
        const ly = (gr - GLYPH_H) * scale; // above the baseline
        for (let py = 0; py < scale; py++) {
          for (let px = 0; px < scale; px++) {
            if (rotated) {
              r.set(Math.round(x) + ly + py, Math.round(y) - lx - px, rgb);
            } else {
              r.set(Math.round(x) + lx + px, Math.round(y) + ly + py, rgb);
            }
          }
        }
      }
    }
  }
}

export function rasterize(scene: Scene): Raster {
  const r = new Raster(scene.width, scene.height);
  for (const p of scene.primitives) {
    switch (p.kind) {
      case "rect":
        fillRect(r, p.x, p.y, p.w, p.h, parseHexColor(p.color));
        break;
      case "polyline":
        drawPolyline(r, p.points, p.width, parseHexColor(p.color), p.dash);
        break;
      case "text":
        drawText(r, p.x, p.y, p.text, p.scale, parseHexColor(p.color), p.anchor, p.rotated);
        break;
    }
  }
  return r;
}
