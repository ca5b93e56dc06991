// Pure coordinate math shared by the canvas view and the crop interaction.
// The displayed image is the original scaled by a single factor and offset;
// every transform below is that scale+translate or its inverse, so overlay
// pixels correspond 1:1 with server-reported original-image coordinates.

import type { CropRect, Rect } from "./types.js";

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

/** Fit an image into a viewport, preserving aspect ratio, centered. */
export function fitImage(
  imageW: number,
  imageH: number,
  viewW: number,
  viewH: number,
): ViewTransform {
  const scale = Math.min(viewW / imageW, viewH / imageH);
  return {
    scale,
    offsetX: (viewW - imageW * scale) / 2,
    offsetY: (viewH - imageH * scale) / 2,
  };
}

export function toScreen(t: ViewTransform, x: number, y: number): [number, number] {
  return [t.offsetX + x * t.scale, t.offsetY + y * t.scale];
}

export function toImage(t: ViewTransform, sx: number, sy: number): [number, number] {
  return [(sx - t.offsetX) / t.scale, (sy - t.offsetY) / t.scale];
}

export function rectToScreen(t: ViewTransform, rect: Rect): [number, number, number, number] {
  const [x0, y0] = toScreen(t, rect.x_min, rect.y_min);
  const [x1, y1] = toScreen(t, rect.x_max + 1, rect.y_max + 1);
  return [x0, y0, x1 - x0, y1 - y0];
}

/**
 * Turn a drag gesture (two screen points) into a crop rectangle in image
 * pixels, clamped to the image and normalized so width/height are positive.
 * Returns null when the drag covers less than 4x4 image pixels.
 */
export function dragToCrop(
  t: ViewTransform,
  startX: number,
  startY: number,
  endX: number,
  endY: number,
  imageW: number,
  imageH: number,
): CropRect | null {
  const [ix0, iy0] = toImage(t, startX, startY);
  const [ix1, iy1] = toImage(t, endX, endY);
  const x = clamp(Math.round(Math.min(ix0, ix1)), 0, imageW - 1);
  const y = clamp(Math.round(Math.min(iy0, iy1)), 0, imageH - 1);
  const x2 = clamp(Math.round(Math.max(ix0, ix1)), 0, imageW);
  const y2 = clamp(Math.round(Math.max(iy0, iy1)), 0, imageH);
  const w = x2 - x;
  const h = y2 - y;
  if (w < 4 || h < 4) return null;
  return { x, y, w, h };
}

export function clamp(v: number, lo: number, hi: number): number {
  return Math.max(lo, Math.min(hi, v));
}

/** Format a crop rectangle for the decode endpoint's form field. */
export function cropField(crop: CropRect): string {
  return `${crop.x},${crop.y},${crop.w},${crop.h}`;
}
