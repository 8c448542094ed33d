"""Turn raw capture logs into a calibrated sample lattice.

The measurement protocol this implements: the finger is pressed against
a plate at a fixed angle while a precision stage advances it; the stage
position at which the measured pressure first exceeds a small threshold
(0.5 kPa by default) becomes the displacement origin z = 0. The stage
then dwells at scheduled displacements; the frames captured during each
static hold are averaged into one representative frame per (z, angle)
condition. One capture session covers one plate angle.

Capture CSV format (UTF-8, header on the first line):

    t_s,angle_deg,stage_z_mm,hold_id,p_0_0,p_0_1,...,p_{R-1}_{C-1}

Pressure columns are row-major kPa; the frame geometry R x C is inferred
from the header names. ``hold_id`` is an integer label marking which
static hold a row belongs to; rows captured between holds (approach,
stage moves) leave it empty and take no part in averaging. Hold
segmentation is explicit in the file because stage moves are not
reliably detectable from the pressure signal itself.

Error line numbers count data rows: the first row after the header is
line 1.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from math import fsum
from pathlib import Path
from typing import IO, Optional, Sequence, Union

import numpy as np

from .core import AxisSpec, PressureFrame, SampleLattice, error_findings, lattice_validate
from .errors import (
    DuplicateNodeError,
    EmptyHold,
    IncompleteGrid,
    InconsistentZSchedule,
    IngestError,
    MalformedHeader,
    MixedHold,
    NegativePressure,
    NeverExceeded,
    NonFiniteValue,
    NonMonotonicTime,
    RowArityMismatch,
)

#: Contact threshold defining the displacement baseline, in kPa.
DEFAULT_THRESHOLD_KPA = 0.5

#: Stage repeatability tolerance used when merging hold schedules, in mm.
Z_TOLERANCE_MM = 1e-6

_FIXED_COLUMNS = ("t_s", "angle_deg", "stage_z_mm", "hold_id")
_PRESSURE_RE = re.compile(r"^p_(\d+)_(\d+)$")

PathOrFile = Union[str, Path, IO[str]]


@dataclass(frozen=True, eq=False)
class RawSample:
    """One timestamped frame with its capture condition."""

    t_s: float
    angle_deg: float
    stage_z_mm: float
    hold_id: Optional[int]
    frame: PressureFrame


@dataclass(frozen=True, eq=False)
class CaptureSession:
    """Time-ordered raw samples with uniform frame geometry."""

    samples: tuple

    def __post_init__(self):
        samples = tuple(self.samples)
        if not samples:
            raise IngestError("capture session has no samples")
        rows, cols = samples[0].frame.rows, samples[0].frame.cols
        last_t = -math.inf
        for i, s in enumerate(samples):
            if (s.frame.rows, s.frame.cols) != (rows, cols):
                raise MixedHold("session frame geometry is not uniform", line=i + 1)
            if s.t_s < last_t:
                raise NonMonotonicTime(
                    f"timestamp {s.t_s} after {last_t}", line=i + 1)
            last_t = s.t_s
            if s.hold_id is not None and s.hold_id < 0:
                raise IngestError(f"hold_id must be >= 0, got {s.hold_id}",
                                  line=i + 1)
        object.__setattr__(self, "samples", samples)

    @property
    def frame_rows(self) -> int:
        return self.samples[0].frame.rows

    @property
    def frame_cols(self) -> int:
        return self.samples[0].frame.cols

    def __len__(self):
        return len(self.samples)


def _parse_header(fields: Sequence[str]):
    if list(fields[:4]) != list(_FIXED_COLUMNS):
        raise MalformedHeader(
            f"header must start with {','.join(_FIXED_COLUMNS)}, "
            f"got {fields[:4]!r}")
    coords = []
    for name in fields[4:]:
        m = _PRESSURE_RE.match(name)
        if not m:
            raise MalformedHeader(f"unexpected pressure column {name!r}")
        coords.append((int(m.group(1)), int(m.group(2))))
    if not coords:
        raise MalformedHeader("no pressure columns")
    rows = max(r for r, _ in coords) + 1
    cols = max(c for _, c in coords) + 1
    expected = [(r, c) for r in range(rows) for c in range(cols)]
    if coords != expected:
        raise MalformedHeader(
            f"pressure columns must enumerate p_0_0..p_{rows - 1}_{cols - 1} "
            "row-major")
    return rows, cols


def _parse_float(token: str, line: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NonFiniteValue(f"{what} {token!r} is not a number", line=line) from None
    if not math.isfinite(value):
        raise NonFiniteValue(f"{what} {token!r} is not finite", line=line)
    return value


def parse_capture(src: PathOrFile) -> CaptureSession:
    """Parse a capture CSV stream into a session.

    Geometry is inferred from the header; rows are validated for arity,
    finiteness, non-negative pressures, and non-decreasing time.
    """
    if hasattr(src, "read"):
        return _parse_capture_file(src)
    with open(src, "r", encoding="utf-8", newline="") as fh:
        return _parse_capture_file(fh)


def _parse_capture_file(fh: IO[str]) -> CaptureSession:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedHeader("capture file is empty") from None
    rows, cols = _parse_header([h.strip() for h in header])
    n_columns = 4 + rows * cols

    samples = []
    last_t = -math.inf
    for line, record in enumerate(reader, start=1):
        if not record:
            continue
        if len(record) != n_columns:
            raise RowArityMismatch(
                f"expected {n_columns} columns, got {len(record)}", line=line)
        t_s = _parse_float(record[0], line, "timestamp")
        if t_s < last_t:
            raise NonMonotonicTime(f"timestamp {t_s} after {last_t}", line=line)
        last_t = t_s
        angle = _parse_float(record[1], line, "angle_deg")
        stage_z = _parse_float(record[2], line, "stage_z_mm")
        hold_token = record[3].strip()
        if hold_token == "":
            hold_id = None
        else:
            try:
                hold_id = int(hold_token)
            except ValueError:
                raise NonFiniteValue(f"hold_id {hold_token!r} is not an integer",
                                     line=line) from None
        values = np.empty(rows * cols, dtype=np.float64)
        for i, token in enumerate(record[4:]):
            values[i] = _parse_float(token, line, f"pressure p[{i}]")
        try:
            frame = PressureFrame(rows, cols, values)
        except NegativePressure:
            raise NegativePressure("row contains negative pressure",
                                   line=line) from None
        samples.append(RawSample(t_s=t_s, angle_deg=angle, stage_z_mm=stage_z,
                                 hold_id=hold_id, frame=frame))
    if not samples:
        raise MalformedHeader("capture file has a header but no data rows")
    return CaptureSession(tuple(samples))


def write_capture(session: CaptureSession, dest: PathOrFile) -> None:
    """Write a session back to capture CSV (shortest round-trip floats)."""
    if hasattr(dest, "write"):
        _write_capture_file(session, dest)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            _write_capture_file(session, fh)


def _write_capture_file(session: CaptureSession, fh: IO[str]) -> None:
    rows, cols = session.frame_rows, session.frame_cols
    header = list(_FIXED_COLUMNS) + [
        f"p_{r}_{c}" for r in range(rows) for c in range(cols)]
    fh.write(",".join(header) + "\n")
    for s in session.samples:
        hold = "" if s.hold_id is None else str(s.hold_id)
        cells = [repr(s.t_s), repr(s.angle_deg), repr(s.stage_z_mm), hold]
        cells.extend(repr(v) for v in s.frame.values.tolist())
        fh.write(",".join(cells) + "\n")


@dataclass(frozen=True)
class BaselineCrossing:
    """First sample whose contact statistic exceeds the threshold."""

    index: int
    t_s: float
    stage_z_mm: float


def _contact_stat(frame: PressureFrame, stat: str) -> float:
    if stat == "max":
        return float(frame.values.max())
    if stat == "sum":
        return float(frame.values.sum())
    raise ValueError(f"unknown contact statistic {stat!r}; use 'max' or 'sum'")


def detect_baseline(session: CaptureSession,
                    threshold_kpa: float = DEFAULT_THRESHOLD_KPA,
                    stat: str = "max") -> BaselineCrossing:
    """Find the contact baseline: the first strict threshold crossing.

    The statistic is the frame maximum by default (most sensitive to
    first touch); ``stat="sum"`` uses the total instead. Crossing is
    strict: a sample exactly at the threshold does not trigger. The
    returned stage position becomes the displacement origin.
    """
    if not (threshold_kpa > 0):
        raise ValueError(f"threshold must be positive, got {threshold_kpa}")
    for i, sample in enumerate(session.samples):
        if _contact_stat(sample.frame, stat) > threshold_kpa:
            return BaselineCrossing(index=i, t_s=sample.t_s,
                                    stage_z_mm=sample.stage_z_mm)
    raise NeverExceeded(
        f"no sample exceeded {threshold_kpa} kPa ({stat} statistic)")


def average_hold(samples: Sequence[RawSample]) -> PressureFrame:
    """Element-wise mean of one hold's frames.

    Uses exactly-rounded summation per element so the result does not
    depend on sample order. All samples must share geometry and hold id.
    """
    samples = list(samples)
    if not samples:
        raise EmptyHold("cannot average an empty hold")
    first = samples[0]
    rows, cols = first.frame.rows, first.frame.cols
    for s in samples[1:]:
        if (s.frame.rows, s.frame.cols) != (rows, cols):
            raise MixedHold("hold mixes frame geometries")
        if s.hold_id != first.hold_id:
            raise MixedHold(
                f"hold mixes hold_ids {first.hold_id!r} and {s.hold_id!r}")
    n = len(samples)
    columns = [s.frame.values for s in samples]
    mean = np.fromiter(
        (fsum(col[e] for col in columns) / n for e in range(rows * cols)),
        dtype=np.float64, count=rows * cols)
    return PressureFrame(rows, cols, mean)


@dataclass(frozen=True)
class _Hold:
    hold_id: int
    z_mm: float  # baseline-relative
    frame: PressureFrame


def _session_holds(session: CaptureSession, threshold_kpa: float,
                   stat: str) -> tuple:
    """Baseline-shift one session and average its holds.

    Returns (angle_deg, sorted tuple of _Hold). Samples within one hold
    must dwell at one stage position (within the stage tolerance).
    """
    angles = {s.angle_deg for s in session.samples}
    if len(angles) != 1:
        raise IngestError(
            f"session must cover exactly one plate angle, found {sorted(angles)}")
    angle = angles.pop()

    origin = detect_baseline(session, threshold_kpa, stat).stage_z_mm

    groups = {}
    for s in session.samples:
        if s.hold_id is None:
            continue
        groups.setdefault(s.hold_id, []).append(s)

    holds = []
    for hold_id in sorted(groups):
        members = groups[hold_id]
        z_values = [m.stage_z_mm for m in members]
        if max(z_values) - min(z_values) > Z_TOLERANCE_MM:
            raise MixedHold(
                f"hold {hold_id} spans stage positions {min(z_values)}.."
                f"{max(z_values)} mm")
        holds.append(_Hold(hold_id=hold_id, z_mm=z_values[0] - origin,
                           frame=average_hold(members)))
    if not holds:
        raise IngestError(f"session at {angle} deg has no holds")

    holds.sort(key=lambda h: h.z_mm)
    for a, b in zip(holds, holds[1:]):
        if b.z_mm - a.z_mm <= Z_TOLERANCE_MM:
            raise DuplicateNodeError(
                f"holds {a.hold_id} and {b.hold_id} both dwell at "
                f"z = {a.z_mm:.6f} mm (angle {angle} deg)")
    return angle, tuple(holds)


def build_lattice(sessions: Sequence[CaptureSession],
                  threshold_kpa: float = DEFAULT_THRESHOLD_KPA,
                  baseline_stat: str = "max") -> SampleLattice:
    """Assemble the calibrated lattice from one session per plate angle.

    Each session is baseline-shifted independently, its holds averaged,
    and the per-session displacement schedules merged: schedules with
    equally many holds must agree within the stage tolerance
    (:data:`Z_TOLERANCE_MM`), otherwise the merge takes the union and any
    session not covering a displacement makes the grid incomplete.
    Axis order of the result is (z, theta).
    """
    if not sessions:
        raise IngestError("no capture sessions given")
    geometries = {(s.frame_rows, s.frame_cols) for s in sessions}
    if len(geometries) != 1:
        raise MixedHold(f"sessions disagree on frame geometry: {geometries}")
    (rows, cols), = geometries

    per_angle = {}
    for session in sessions:
        angle, holds = _session_holds(session, threshold_kpa, baseline_stat)
        if angle in per_angle:
            raise DuplicateNodeError(
                f"two sessions cover plate angle {angle} deg")
        per_angle[angle] = holds
    angles = sorted(per_angle)

    schedules = {angle: [h.z_mm for h in holds]
                 for angle, holds in per_angle.items()}
    counts = {len(zs) for zs in schedules.values()}
    canonical = schedules[angles[0]]
    if len(counts) == 1:
        # Equal-length schedules must align pairwise within tolerance.
        for angle in angles[1:]:
            for a, b in zip(canonical, schedules[angle]):
                if abs(a - b) > Z_TOLERANCE_MM:
                    raise InconsistentZSchedule(
                        f"sessions disagree on displacement schedule: "
                        f"{a:.6f} vs {b:.6f} mm (angle {angle} deg)")
        z_axis = list(canonical)
    else:
        # Union merge: map each hold to the nearest canonical z.
        z_axis = []
        for zs in schedules.values():
            for z in zs:
                if not any(abs(z - c) <= Z_TOLERANCE_MM for c in z_axis):
                    z_axis.append(z)
        z_axis.sort()

    def z_index(z: float) -> int:
        for i, c in enumerate(z_axis):
            if abs(z - c) <= Z_TOLERANCE_MM:
                return i
        raise AssertionError(f"unmapped displacement {z}")

    frames = {}
    for t_idx, angle in enumerate(angles):
        for hold in per_angle[angle]:
            frames[(z_index(hold.z_mm), t_idx)] = hold.frame

    missing = [(zi, ti)
               for zi in range(len(z_axis))
               for ti in range(len(angles))
               if (zi, ti) not in frames]
    if missing:
        raise IncompleteGrid(missing)

    lattice = SampleLattice(
        axes=(AxisSpec("z", "mm", z_axis), AxisSpec("theta", "deg", angles)),
        frame_rows=rows,
        frame_cols=cols,
        frames=frames,
    )
    defects = error_findings(lattice_validate(lattice))
    if defects:  # construction above guarantees this never triggers
        raise IngestError(f"internal: built lattice is invalid: {defects!r}")
    return lattice
