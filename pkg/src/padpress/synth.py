"""Synthetic capture generation for demos and tests.

Emulates the measurement protocol without hardware: an approach phase
ramping below the contact threshold, a threshold crossing, then static
holds at scheduled displacements. Pressure frames are a smooth contact
blob whose amplitude grows with displacement and whose centroid shifts
with plate angle, plus optional sensor noise.
"""

from __future__ import annotations

import numpy as np

from .core import DEFAULT_COLS, DEFAULT_ROWS, PressureFrame
from .ingest import CaptureSession, RawSample


def _blob(rows: int, cols: int, peak_kpa: float, angle_deg: float) -> np.ndarray:
    r = np.arange(rows)[:, None]
    c = np.arange(cols)[None, :]
    # Centroid drifts along the rows with plate angle; spread tightens a bit.
    r0 = rows / 2.0 + (angle_deg - 30.0) / 15.0
    c0 = (cols - 1) / 2.0
    sigma_r = rows / 5.0
    sigma_c = cols / 4.5
    blob = peak_kpa * np.exp(-(((r - r0) / sigma_r) ** 2
                               + ((c - c0) / sigma_c) ** 2))
    return blob.reshape(-1)


def synth_session(angle_deg: float,
                  hold_z_mm=(0.0, 0.5, 1.0, 1.5),
                  rows: int = DEFAULT_ROWS,
                  cols: int = DEFAULT_COLS,
                  samples_per_hold: int = 4,
                  peak_at_max_kpa: float = 60.0,
                  noise_kpa: float = 0.05,
                  seed: int = 0,
                  dt_s: float = 0.1,
                  baseline_stage_mm: float = 2.0) -> CaptureSession:
    """One synthetic per-angle session following the capture protocol.

    The approach phase stays below 0.5 kPa until the stage reaches
    ``baseline_stage_mm``, where the pressure crosses the threshold;
    holds then dwell at ``baseline_stage_mm + hold_z_mm``.
    """
    rng = np.random.default_rng(seed)
    samples = []
    t = 0.0

    def frame_at(depth_mm: float) -> PressureFrame:
        # Amplitude grows smoothly past contact; keeps sub-threshold
        # approach frames genuinely quiet.
        if depth_mm <= 0:
            peak = 0.4 * max(0.0, 1.0 + depth_mm)  # fades out before contact
        else:
            peak = 1.0 + peak_at_max_kpa * (depth_mm / max(hold_z_mm[-1], 0.5))
        values = _blob(rows, cols, peak, angle_deg)
        if noise_kpa > 0:
            values = values + rng.uniform(0.0, noise_kpa, size=values.size)
        return PressureFrame(rows, cols, np.clip(values, 0.0, None))

    # Approach: three sub-threshold steps before the crossing.
    for approach in (-0.75, -0.5, -0.25):
        samples.append(RawSample(
            t_s=t, angle_deg=angle_deg,
            stage_z_mm=baseline_stage_mm + approach,
            hold_id=None, frame=frame_at(approach)))
        t += dt_s
    # Crossing sample at the baseline stage position.
    samples.append(RawSample(
        t_s=t, angle_deg=angle_deg, stage_z_mm=baseline_stage_mm,
        hold_id=None, frame=frame_at(0.02)))
    t += dt_s

    for hold_id, z in enumerate(hold_z_mm):
        for _ in range(samples_per_hold):
            samples.append(RawSample(
                t_s=t, angle_deg=angle_deg,
                stage_z_mm=baseline_stage_mm + z,
                hold_id=hold_id, frame=frame_at(max(z, 0.02))))
            t += dt_s
    return CaptureSession(tuple(samples))
