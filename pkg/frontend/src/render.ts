/** Heatmap rendering: one filled rect per sensor element.
 *
 * Pure in its inputs: the same frame, gain, and palette produce the
 * same sequence of fill operations, so tests can golden-match a fake
 * context's log.
 */

import { Palette, cellColor } from './colormap.js';
import type { FrameMessage } from './protocol.js';

/** Minimal 2D-context surface needed by the renderer. */
export interface Canvas2DLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  fillRect(x: number, y: number, w: number, h: number): void;
}

/** Draw rows x cols cells; returns the number of cells drawn. */
export function renderFrame(
  ctx: Canvas2DLike,
  frame: FrameMessage,
  gainKpa: number,
  palette: Palette,
  width: number,
  height: number,
): number {
  const cellW = width / frame.cols;
  const cellH = height / frame.rows;
  let drawn = 0;
  for (let r = 0; r < frame.rows; r += 1) {
    for (let c = 0; c < frame.cols; c += 1) {
      ctx.fillStyle = cellColor(frame.values[r * frame.cols + c], gainKpa, palette);
      ctx.fillRect(c * cellW, r * cellH, cellW, cellH);
      drawn += 1;
    }
  }
  return drawn;
}
