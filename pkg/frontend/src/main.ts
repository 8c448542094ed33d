/** DOM bootstrap: wires the pad, sliders, canvas, and readouts to the
 * client. Everything here is thin glue over the tested modules.
 */

import { ExplorerClient } from './client.js';
import { coordsToPad } from './mapping.js';
import type { Palette } from './colormap.js';
import { renderFrame } from './render.js';
import { ViewerState, clampedAxes } from './state.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>('heatmap');
const ctx = canvas.getContext('2d');
const pad = el<HTMLDivElement>('pad');
const padCursor = el<HTMLDivElement>('pad-cursor');
const statusBadge = el<HTMLSpanElement>('status');
const coordsOut = el<HTMLSpanElement>('coords');
const computeOut = el<HTMLSpanElement>('compute');
const clampOut = el<HTMLSpanElement>('clamp');
const slidersBox = el<HTMLDivElement>('sliders');
const gainSlider = el<HTMLInputElement>('gain');
const gainOut = el<HTMLSpanElement>('gain-value');
const paletteSelect = el<HTMLSelectElement>('palette');

const wsUrl = `${location.protocol === 'https:' ? 'wss' : 'ws'}://${location.host}/ws`;
const client = new ExplorerClient({ url: wsUrl });

let palette: Palette = 'gray';
let sliderInputs: HTMLInputElement[] = [];
let renderQueued = false;

function buildSliders(state: ViewerState): void {
  slidersBox.innerHTML = '';
  sliderInputs = state.axes.map((axis, i) => {
    const row = document.createElement('label');
    row.className = 'slider-row';
    const caption = document.createElement('span');
    caption.textContent = `${axis.name} [${axis.unit}]`;
    const input = document.createElement('input');
    input.type = 'range';
    input.min = String(axis.min);
    input.max = String(axis.max);
    input.step = String((axis.max - axis.min) / 200 || 1);
    input.value = String(state.coords[i]);
    input.addEventListener('input', () => {
      client.steerAxis(i, Number(input.value));
    });
    const value = document.createElement('span');
    value.className = 'slider-value';
    row.append(caption, input, value);
    slidersBox.append(row);
    return input;
  });
  gainSlider.min = '1';
  gainSlider.max = String(Math.ceil(state.fullScaleKpa * 1.5));
  gainSlider.value = String(state.gainKpa);
}

function syncControls(state: ViewerState): void {
  state.coords.forEach((value, i) => {
    const input = sliderInputs[i];
    if (input && document.activeElement !== input) {
      input.value = String(value);
    }
    const label = input?.nextElementSibling as HTMLSpanElement | undefined;
    const valueSpan = input?.parentElement?.querySelector('.slider-value');
    if (valueSpan) valueSpan.textContent = value.toFixed(3);
    void label;
  });
  const { x, y } = coordsToPad(state.axes, state.coords);
  padCursor.style.left = `${x * 100}%`;
  padCursor.style.top = `${(1 - y) * 100}%`;
}

function draw(state: ViewerState): void {
  if (!ctx || !state.frame) return;
  renderFrame(ctx, state.frame, state.gainKpa, palette, canvas.width, canvas.height);
}

client.onChange = (state) => {
  statusBadge.textContent = state.status;
  statusBadge.className = `badge ${state.status}`;
  if (state.axes.length > 0 && sliderInputs.length !== state.axes.length) {
    buildSliders(state);
  }
  syncControls(state);
  if (state.frame) {
    const q = state.frame.query;
    coordsOut.textContent = state.axes
      .map((ax) => `${ax.name}=${(q[ax.name] ?? 0).toFixed(3)} ${ax.unit}`)
      .join('  ');
    computeOut.textContent = `${state.frame.compute_us.toFixed(1)} us`;
  }
  const clamped = clampedAxes(state);
  clampOut.textContent = clamped.length ? `clamped: ${clamped.join(', ')}` : '';
  clampOut.className = clamped.length ? 'badge clamped' : 'badge hidden';
  if (!renderQueued) {
    renderQueued = true;
    requestAnimationFrame(() => {
      renderQueued = false;
      draw(client.state);
    });
  }
};

function padSteer(event: PointerEvent): void {
  const rect = pad.getBoundingClientRect();
  const x = (event.clientX - rect.left) / rect.width;
  const y = 1 - (event.clientY - rect.top) / rect.height;
  client.steerPad(Math.min(1, Math.max(0, x)), Math.min(1, Math.max(0, y)));
}

let padActive = false;
pad.addEventListener('pointerdown', (event) => {
  padActive = true;
  pad.setPointerCapture(event.pointerId);
  padSteer(event);
});
pad.addEventListener('pointermove', (event) => {
  if (padActive) padSteer(event);
});
pad.addEventListener('pointerup', () => {
  padActive = false;
});

gainSlider.addEventListener('input', () => {
  client.setGain(Number(gainSlider.value));
  gainOut.textContent = `${gainSlider.value} kPa`;
  draw(client.state);
});

paletteSelect.addEventListener('change', () => {
  palette = paletteSelect.value as Palette;
  draw(client.state);
});

client.connect();
