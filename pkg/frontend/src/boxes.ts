import type { Box } from './types'

export const MIN_DRAG_PX = 3

/**
 * Normalize a drag gesture into an axis-aligned box in image coordinates.
 * Returns null for degenerate drags (< MIN_DRAG_PX in either direction).
 */
export function boxFromDrag(
  x0: number,
  y0: number,
  x1: number,
  y1: number,
): Box | null {
  const w = Math.abs(x1 - x0)
  const h = Math.abs(y1 - y0)
  if (w < MIN_DRAG_PX || h < MIN_DRAG_PX) return null
  return { x: Math.min(x0, x1), y: Math.min(y0, y1), w, h }
}

/** Clamp a box to the frame so no edge lies outside [0, width] x [0, height]. */
export function clampBox(box: Box, width: number, height: number): Box {
  const x = Math.min(Math.max(box.x, 0), width)
  const y = Math.min(Math.max(box.y, 0), height)
  const w = Math.min(box.w, width - x)
  const h = Math.min(box.h, height - y)
  return { x, y, w, h }
}

/**
 * Convert canvas-space coordinates to image space, compensating for the
 * canvas CSS scale (the canvas may be displayed at a different size than
 * the underlying frame raster).
 */
export function canvasToImage(
  cx: number,
  cy: number,
  canvasWidth: number,
  canvasHeight: number,
  imageWidth: number,
  imageHeight: number,
): { x: number; y: number } {
  return {
    x: (cx * imageWidth) / canvasWidth,
    y: (cy * imageHeight) / canvasHeight,
  }
}

/** Overlay scale factor for degraded sessions: LR boxes render on the LR raster. */
export function overlayScale(
  degradation: { kind: 'blur'; n: number } | { kind: 'lr'; m: number } | null,
): number {
  return degradation && degradation.kind === 'lr' ? 1 / degradation.m : 1
}

/** Color coding for box provenance. */
export function sourceColor(source: 'manual' | 'tracked' | 'corrected'): string {
  switch (source) {
    case 'manual':
      return '#2ecc71'
    case 'tracked':
      return '#3498db'
    case 'corrected':
      return '#e67e22'
  }
}
