/** Viewer state and its pure transition functions.
 *
 * Everything the UI shows derives from this object; network and DOM
 * layers stay thin. The latest frame wins: an out-of-order or
 * geometry-mismatched frame is dropped (and counted) instead of
 * displayed.
 */

import type { AxisInfo, FrameMessage, HelloMessage } from './protocol.js';

export type ConnectionStatus = 'connecting' | 'online' | 'offline';

export interface ViewerState {
  status: ConnectionStatus;
  axes: AxisInfo[];
  rows: number;
  cols: number;
  fullScaleKpa: number;
  /** Current steer position, one coordinate per axis. */
  coords: number[];
  /** Last frame accepted for display, if any. */
  frame: FrameMessage | null;
  /** kPa value rendered at max intensity. */
  gainKpa: number;
  droppedFrames: number;
  lastError: string | null;
}

export function initialState(): ViewerState {
  return {
    status: 'connecting',
    axes: [],
    rows: 0,
    cols: 0,
    fullScaleKpa: 1,
    coords: [],
    frame: null,
    gainKpa: 1,
    droppedFrames: 0,
    lastError: null,
  };
}

/** Configure ranges, grid size, and default gain from the handshake. */
export function applyHello(state: ViewerState, hello: HelloMessage): ViewerState {
  return {
    ...state,
    status: 'online',
    axes: hello.axes,
    rows: hello.rows,
    cols: hello.cols,
    fullScaleKpa: hello.full_scale_kpa,
    gainKpa: hello.full_scale_kpa,
    coords: hello.axes.map((ax) => ax.min),
    frame: null,
    lastError: null,
  };
}

/** Keep-latest frame update; drops stale or mismatched frames. */
export function applyFrame(state: ViewerState, frame: FrameMessage): ViewerState {
  if (frame.rows !== state.rows || frame.cols !== state.cols) {
    return { ...state, droppedFrames: state.droppedFrames + 1 };
  }
  if (frame.values.length !== frame.rows * frame.cols) {
    return { ...state, droppedFrames: state.droppedFrames + 1 };
  }
  if (state.frame !== null && frame.t_us < state.frame.t_us) {
    return { ...state, droppedFrames: state.droppedFrames + 1 };
  }
  return { ...state, frame };
}

export function applyError(state: ViewerState, reason: string): ViewerState {
  return { ...state, lastError: reason };
}

export function applyDisconnect(state: ViewerState): ViewerState {
  return { ...state, status: 'offline' };
}

export function applyConnecting(state: ViewerState): ViewerState {
  return { ...state, status: 'connecting' };
}

/** Axis names whose last query was clamped, from the displayed frame. */
export function clampedAxes(state: ViewerState): string[] {
  if (!state.frame) return [];
  return Object.entries(state.frame.clamped)
    .filter(([, flag]) => flag !== 'inside')
    .map(([name]) => name);
}
