// Deterministic rasterisation of a stroke session: dark ink on white,
// matching the backend's dark-on-light convention.

import { encodeGrayPng } from "./png.js";
import type { Stroke, StrokeSession } from "./strokes.js";

function stampDisc(pixels: Uint8Array, size: number, cx: number, cy: number, radius: number): void {
  const r = Math.max(0, radius);
  const x0 = Math.max(0, Math.floor(cx - r));
  const x1 = Math.min(size - 1, Math.ceil(cx + r));
  const y0 = Math.max(0, Math.floor(cy - r));
  const y1 = Math.min(size - 1, Math.ceil(cy + r));
  const rr = Math.max(0.5, r) ** 2;
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      if ((x - cx) ** 2 + (y - cy) ** 2 <= rr) {
        pixels[y * size + x] = 0;
      }
    }
  }
}

function stampSegment(
  pixels: Uint8Array,
  size: number,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
  radius: number,
): void {
  const steps = Math.max(1, Math.ceil(Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0))));
  for (let i = 0; i <= steps; i++) {
    const t = i / steps;
    stampDisc(pixels, size, x0 + (x1 - x0) * t, y0 + (y1 - y0) * t, radius);
  }
}

function stampStroke(pixels: Uint8Array, size: number, stroke: Stroke, scale: number): void {
  const radius = (stroke.width * scale) / 2;
  const pts = stroke.points;
  if (pts.length === 1) {
    stampDisc(pixels, size, pts[0].x * scale, pts[0].y * scale, Math.max(radius, 0.5));
    return;
  }
  for (let i = 1; i < pts.length; i++) {
    stampSegment(
      pixels,
      size,
      pts[i - 1].x * scale,
      pts[i - 1].y * scale,
      pts[i].x * scale,
      pts[i].y * scale,
      radius,
    );
  }
}

/** Render the session to grayscale pixel values (255 background, 0 ink). */
export function rasterizePixels(session: StrokeSession, size: number): Uint8Array {
  if (session.isEmpty) {
    throw new Error("cannot rasterize an empty session");
  }
  const pixels = new Uint8Array(size * size).fill(255);
  const scale = size / session.size;
  for (const stroke of session.strokes) {
    stampStroke(pixels, size, stroke, scale);
  }
  return pixels;
}

/** PNG bytes of the session; same session always yields identical bytes. */
export function rasterizeSession(session: StrokeSession, size: number): Uint8Array {
  return encodeGrayPng(rasterizePixels(session, size), size, size);
}
