/** Pressure -> color mapping for the heatmap. */

export type Palette = 'gray' | 'thermal';

/** Normalized intensity in [0, 1]; gain is the pressure mapped to 1. */
export function intensity(valueKpa: number, gainKpa: number): number {
  if (gainKpa <= 0) return 0;
  const t = valueKpa / gainKpa;
  return t < 0 ? 0 : t > 1 ? 1 : t;
}

function channel(v: number): number {
  return Math.round(v * 255);
}

/** CSS color for one cell. Monotone in pressure for both palettes. */
export function cellColor(valueKpa: number, gainKpa: number, palette: Palette): string {
  const t = intensity(valueKpa, gainKpa);
  if (palette === 'gray') {
    const g = channel(t);
    return `rgb(${g},${g},${g})`;
  }
  // thermal: black -> red -> yellow -> white
  const r = channel(Math.min(1, 3 * t));
  const g = channel(Math.min(1, Math.max(0, 3 * t - 1)));
  const b = channel(Math.min(1, Math.max(0, 3 * t - 2)));
  return `rgb(${r},${g},${b})`;
}
