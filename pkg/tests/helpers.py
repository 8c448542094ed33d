"""Shared builders for synthetic lattices, sessions, and trajectories."""

import numpy as np

from padpress.core import AxisSpec, PressureFrame, SampleLattice
from padpress.ingest import CaptureSession, RawSample

SCHEDULE_Z = (0.0, 0.5, 1.0, 1.5)
SCHEDULE_THETA = (15.0, 30.0, 45.0)


def random_lattice(axes_samples, rows=16, cols=15, rng=None, scale=80.0,
                   names=None, units=None):
    """Lattice with uniform-random frames at every node."""
    rng = rng or np.random.default_rng(0)
    names = names or [f"x{k}" for k in range(len(axes_samples))]
    units = units or ["u"] * len(axes_samples)
    axes = tuple(AxisSpec(n, u, s)
                 for n, u, s in zip(names, units, axes_samples))
    shape = tuple(len(s) for s in axes_samples)
    frames = {}
    for idx in np.ndindex(*shape):
        frames[idx] = PressureFrame(rows, cols,
                                    rng.uniform(0.0, scale, rows * cols))
    return SampleLattice(axes=axes, frame_rows=rows, frame_cols=cols,
                         frames=frames)


def schedule_lattice(rows=16, cols=15, rng=None, scale=80.0):
    """4x3-node lattice on the measured z / theta schedule."""
    return random_lattice([list(SCHEDULE_Z), list(SCHEDULE_THETA)], rows, cols,
                          rng=rng, scale=scale, names=["z", "theta"],
                          units=["mm", "deg"])


def session_from_holds(angle_deg, holds, rows=2, cols=2, approach=True,
                       baseline_stage_mm=2.0, dt_s=0.1):
    """Session with explicit per-hold frame values.

    ``holds`` maps hold z (baseline-relative mm) to a list of flat value
    arrays; one RawSample per array. An approach phase (below threshold,
    no hold id) precedes the holds so baseline detection has something
    to find: the crossing sample peaks at 1.0 kPa at the baseline stage
    position.
    """
    samples = []
    t = 0.0
    quiet = np.full(rows * cols, 0.01)
    if approach:
        for dz in (-0.5, -0.25):
            samples.append(RawSample(t, angle_deg, baseline_stage_mm + dz,
                                     None, PressureFrame(rows, cols, quiet)))
            t += dt_s
        crossing = np.full(rows * cols, 0.02)
        crossing[0] = 1.0
        samples.append(RawSample(t, angle_deg, baseline_stage_mm, None,
                                 PressureFrame(rows, cols, crossing)))
        t += dt_s
    for hold_id, z in enumerate(sorted(holds)):
        for values in holds[z]:
            samples.append(RawSample(t, angle_deg, baseline_stage_mm + z,
                                     hold_id,
                                     PressureFrame(rows, cols, values)))
            t += dt_s
    return CaptureSession(tuple(samples))


def write_trajectory(path, rows, axis_names=("z", "theta")):
    """rows: iterable of (t_s, coord...) tuples."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(["t_s", *axis_names]) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
