/** WebSocket client: connection lifecycle, steering, rate limiting.
 *
 * The socket, clock, and timer are injectable so the whole loop can be
 * driven by a scripted mock server in tests. Input messages carry a
 * strictly increasing seq and are rate-limited to at most
 * MAX_SEND_RATE_HZ per second with a trailing send, so the final pad
 * position always reaches the server.
 */

import { padToCoords } from './mapping.js';
import { parseServerMessage } from './protocol.js';
import {
  ViewerState,
  applyConnecting,
  applyDisconnect,
  applyError,
  applyFrame,
  applyHello,
  initialState,
} from './state.js';

export const MAX_SEND_RATE_HZ = 120;
const RECONNECT_DELAY_MS = 1000;

/** The subset of the WebSocket API the client needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export interface ClientOptions {
  url: string;
  socketFactory?: (url: string) => SocketLike;
  now?: () => number;
  schedule?: (fn: () => void, ms: number) => void;
  reconnect?: boolean;
}

export class ExplorerClient {
  state: ViewerState = initialState();
  onChange: ((state: ViewerState) => void) | null = null;

  private readonly url: string;
  private readonly socketFactory: (url: string) => SocketLike;
  private readonly now: () => number;
  private readonly schedule: (fn: () => void, ms: number) => void;
  private readonly reconnect: boolean;

  private socket: SocketLike | null = null;
  private seq = 0;
  private lastSendMs = -Infinity;
  private pending: number[] | null = null;
  private flushScheduled = false;

  constructor(options: ClientOptions) {
    this.url = options.url;
    this.socketFactory =
      options.socketFactory ?? ((url) => new WebSocket(url) as unknown as SocketLike);
    this.now = options.now ?? (() => Date.now());
    this.schedule =
      options.schedule ?? ((fn, ms) => void setTimeout(fn, ms));
    this.reconnect = options.reconnect ?? true;
  }

  connect(): void {
    this.update(applyConnecting(this.state));
    let socket: SocketLike;
    try {
      socket = this.socketFactory(this.url);
    } catch {
      this.handleClose();
      return;
    }
    this.socket = socket;
    socket.onopen = () => undefined; // hello drives the online transition
    socket.onmessage = (event) => this.handleMessage(event.data);
    socket.onclose = () => this.handleClose();
    socket.onerror = () => undefined; // close follows
  }

  /** Steer with a normalized pad position (x -> axis 1, y -> axis 0). */
  steerPad(padX: number, padY: number): void {
    if (this.state.axes.length === 0) return;
    this.steerCoords(padToCoords(this.state.axes, this.state.coords, padX, padY));
  }

  /** Steer one axis to an absolute coordinate (slider input). */
  steerAxis(axisIndex: number, value: number): void {
    const axis = this.state.axes[axisIndex];
    if (!axis) return;
    const coords = this.state.coords.slice();
    coords[axisIndex] = Math.min(axis.max, Math.max(axis.min, value));
    this.steerCoords(coords);
  }

  /** Set display gain (kPa at max intensity). */
  setGain(gainKpa: number): void {
    if (gainKpa > 0) this.update({ ...this.state, gainKpa });
  }

  private steerCoords(coords: number[]): void {
    this.update({ ...this.state, coords });
    const interval = 1000 / MAX_SEND_RATE_HZ;
    const elapsed = this.now() - this.lastSendMs;
    if (elapsed >= interval) {
      this.sendInput(coords);
    } else {
      this.pending = coords;
      if (!this.flushScheduled) {
        this.flushScheduled = true;
        this.schedule(() => this.flushPending(), interval - elapsed);
      }
    }
  }

  private flushPending(): void {
    this.flushScheduled = false;
    if (this.pending !== null) {
      const coords = this.pending;
      this.pending = null;
      this.sendInput(coords);
    }
  }

  private sendInput(coords: number[]): void {
    if (!this.socket || this.state.status !== 'online') return;
    this.seq += 1;
    this.lastSendMs = this.now();
    const payload: Record<string, number> = {};
    this.state.axes.forEach((axis, i) => {
      payload[axis.name] = coords[i];
    });
    this.socket.send(
      JSON.stringify({ type: 'input', seq: this.seq, coords: payload }),
    );
  }

  private handleMessage(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) return;
    if (msg.type === 'hello') {
      this.update(applyHello(this.state, msg));
    } else if (msg.type === 'frame') {
      this.update(applyFrame(this.state, msg));
    } else {
      this.update(applyError(this.state, msg.reason));
    }
  }

  private handleClose(): void {
    this.socket = null;
    this.update(applyDisconnect(this.state));
    if (this.reconnect) {
      this.schedule(() => this.connect(), RECONNECT_DELAY_MS);
    }
  }

  private update(next: ViewerState): void {
    this.state = next;
    this.onChange?.(next);
  }
}
