/** Linear mapping between normalized pad position and axis coordinates.
 *
 * The pad is a unit square with (0, 0) at the bottom-left: x spans the
 * second axis (contact angle in the two-input setup) and y spans the
 * first axis (displacement). Positions are clamped to the pad, so the
 * emitted coordinates always stay inside the advertised axis ranges.
 */

import type { AxisInfo } from './protocol.js';

export function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

/** Normalized [0,1] -> axis coordinate. */
export function toAxisValue(axis: AxisInfo, norm: number): number {
  return axis.min + clamp01(norm) * (axis.max - axis.min);
}

/** Axis coordinate -> normalized [0,1] (0 for degenerate axes). */
export function toNorm(axis: AxisInfo, value: number): number {
  if (axis.max <= axis.min) return 0;
  return clamp01((value - axis.min) / (axis.max - axis.min));
}

/** Pad position -> full coordinate vector (pad y -> axis 0, pad x -> axis 1).
 *
 * Axes beyond the first two keep their current values.
 */
export function padToCoords(
  axes: AxisInfo[],
  current: number[],
  padX: number,
  padY: number,
): number[] {
  const coords = current.slice();
  if (axes.length >= 1) coords[0] = toAxisValue(axes[0], padY);
  if (axes.length >= 2) coords[1] = toAxisValue(axes[1], padX);
  return coords;
}

/** Coordinate vector -> pad position (inverse of padToCoords). */
export function coordsToPad(axes: AxisInfo[], coords: number[]): { x: number; y: number } {
  const y = axes.length >= 1 ? toNorm(axes[0], coords[0]) : 0;
  const x = axes.length >= 2 ? toNorm(axes[1], coords[1]) : 0;
  return { x, y };
}
