import { describe, expect, it } from 'vitest';

import { coordsToPad, padToCoords, toAxisValue, toNorm } from '../src/mapping.js';
import { demoHello } from './mocks.js';

const axes = demoHello.axes;

describe('padToCoords', () => {
  it('maps the pad midpoint to the range midpoints', () => {
    expect(padToCoords(axes, [0, 15], 0.5, 0.5)).toEqual([0.75, 30.0]);
  });

  it('maps the min corner to the axis minima', () => {
    expect(padToCoords(axes, [1, 40], 0, 0)).toEqual([0.0, 15.0]);
  });

  it('maps the max corner to the axis maxima', () => {
    expect(padToCoords(axes, [0, 15], 1, 1)).toEqual([1.5, 45.0]);
  });

  it('clamps positions outside the pad', () => {
    expect(padToCoords(axes, [0, 15], -0.2, 1.7)).toEqual([1.5, 15.0]);
  });

  it('keeps extra-axis coordinates unchanged', () => {
    const threeAxes = [...axes, { name: 'phi', unit: 'deg', min: -10, max: 10 }];
    expect(padToCoords(threeAxes, [0, 15, 3.5], 0.5, 0.5)).toEqual([0.75, 30.0, 3.5]);
  });
});

describe('coordsToPad', () => {
  it('inverts padToCoords inside the ranges', () => {
    const coords = padToCoords(axes, [0, 15], 0.25, 0.75);
    const pad = coordsToPad(axes, coords);
    expect(pad.x).toBeCloseTo(0.25, 12);
    expect(pad.y).toBeCloseTo(0.75, 12);
  });

  it('is 0 for degenerate axes', () => {
    const flat = [{ name: 'z', unit: 'mm', min: 1.0, max: 1.0 }];
    expect(coordsToPad(flat, [1.0])).toEqual({ x: 0, y: 0 });
  });
});

describe('axis scaling', () => {
  it('round-trips values', () => {
    const axis = axes[1];
    for (const v of [15, 22.5, 30, 45]) {
      expect(toAxisValue(axis, toNorm(axis, v))).toBeCloseTo(v, 12);
    }
  });
});
