/** Message types of the rendering service's WebSocket protocol. */

export interface AxisInfo {
  name: string;
  unit: string;
  min: number;
  max: number;
}

export interface HelloMessage {
  type: 'hello';
  axes: AxisInfo[];
  rows: number;
  cols: number;
  full_scale_kpa: number;
}

export interface FrameMessage {
  type: 'frame';
  seq: number;
  t_us: number;
  query: Record<string, number>;
  clamped: Record<string, 'below' | 'inside' | 'above'>;
  rows: number;
  cols: number;
  values: number[];
  compute_us: number;
}

export interface ErrorMessage {
  type: 'error';
  reason: string;
}

export type ServerMessage = HelloMessage | FrameMessage | ErrorMessage;

export interface InputMessage {
  type: 'input';
  seq: number;
  coords: Record<string, number>;
}

/** Parse one raw server message; returns null for anything malformed. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== 'object' || doc === null) return null;
  const msg = doc as Record<string, unknown>;
  switch (msg.type) {
    case 'hello':
      if (!Array.isArray(msg.axes)) return null;
      if (typeof msg.rows !== 'number' || typeof msg.cols !== 'number') return null;
      return msg as unknown as HelloMessage;
    case 'frame':
      if (!Array.isArray(msg.values)) return null;
      if (typeof msg.rows !== 'number' || typeof msg.cols !== 'number') return null;
      return msg as unknown as FrameMessage;
    case 'error':
      if (typeof msg.reason !== 'string') return null;
      return msg as unknown as ErrorMessage;
    default:
      return null;
  }
}
