/**
 * SVG backend: serializes a scene to a standalone SVG document.
 *
 * Output is pure text with coordinates quantized to 0.1 px, so identical
 * scenes produce byte-identical files.
 */

import type { Primitive, Scene } from "./scene.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function n(v: number): string {
  const s = v.toFixed(1);
  return s === "-0.0" ? "0.0" : s;
}

const FONT_FAMILY = "DejaVu Sans Mono, Menlo, Consolas, monospace";

function emit(p: Primitive): string {
  switch (p.kind) {
    case "rect":
      return `<rect x="${n(p.x)}" y="${n(p.y)}" width="${n(p.w)}" height="${n(p.h)}" fill="${p.color}"/>`;
    case "polyline": {
      const pts = p.points.map(([x, y]) => `${n(x)},${n(y)}`).join(" ");
      const dash = p.dash ? ` stroke-dasharray="${p.dash.join(",")}"` : "";
      return `<polyline fill="none" stroke="${p.color}" stroke-width="${p.width}"${dash} points="${pts}"/>`;
    }
    case "text": {
      const size = 8 * p.scale;
      const transform = p.rotated ? ` transform="rotate(-90 ${n(p.x)} ${n(p.y)})"` : "";
      return (
        `<text x="${n(p.x)}" y="${n(p.y)}" font-family="${FONT_FAMILY}" font-size="${size}"` +
        ` fill="${p.color}" text-anchor="${p.anchor}"${transform}>${esc(p.text)}</text>`
      );
    }
  }
}

export function sceneToSvg(scene: Scene): string {
  const lines = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
    ...scene.primitives.map(emit),
    `</svg>`,
  ];
  return lines.join("\n") + "\n";
}
