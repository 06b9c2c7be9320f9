import { interpolateViridis } from "d3-scale-chromatic";

/** Clamp a value into [lo, hi]. */
export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(Math.max(value, lo), hi);
}

/**
 * Viridis color for a value on the given domain; values outside the
 * domain clamp to the endpoint colors, and NaN maps to a neutral gray.
 */
export function viridis(value: number, lo: number, hi: number): string {
  if (Number.isNaN(value)) {
    return "rgb(128, 128, 128)";
  }
  const t = hi > lo ? clamp((value - lo) / (hi - lo), 0.0, 1.0) : 0.5;
  return interpolateViridis(t);
}

/** Fixed Husimi color scale: the function's range is [0, 1/pi]. */
export const HUSIMI_MAX = 1.0 / Math.PI;

export function husimiColor(value: number): string {
  return viridis(value, 0.0, HUSIMI_MAX);
}

/** Vertical colorbar as SVG rows plus end labels, for map figures. */
export interface ColorbarSpec {
  x: number;
  y: number;
  width: number;
  height: number;
  lo: number;
  hi: number;
  loLabel: string;
  hiLabel: string;
}
