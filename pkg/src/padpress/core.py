"""Domain types shared by every padpress module.

The data model is small and strictly layered:

* :class:`PressureFrame` -- one rows x cols grid of pressures in kPa,
  stored row-major. Element index i is the row-major flat index; this
  ordering is fixed here once and relied on everywhere (file formats,
  kernels, exports).
* :class:`AxisSpec` -- one named input axis (e.g. displacement ``z`` in
  mm, plate angle ``theta`` in deg) with strictly increasing samples.
* :class:`SampleLattice` -- the predictive model: a frame measured at
  every point of the Cartesian product of the axes' samples.
* :class:`QueryPoint` -- a D-vector of input coordinates at which to
  predict a frame.

All types are immutable after construction and safe to share across
threads. ``PressureFrame`` and ``AxisSpec`` validate themselves on
construction. ``SampleLattice`` validates its per-field invariants but
*not* grid completeness, so that :func:`lattice_validate` can inspect
defective lattices; the factories in :mod:`padpress.lattice_io` and
:mod:`padpress.ingest` always return validated lattices.

Pressure values above ``full_scale_kpa`` are legal: capacitive arrays
clip at full scale, so saturation is surfaced as a validation warning
rather than rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativePressure,
    NonFiniteValue,
    NonIncreasingAxis,
)

#: Sensor full scale in kPa (TACTARRAY-class capacitive array).
FULL_SCALE_KPA = 82.87

#: Default sensor element pitch in mm. The sensor datasheet phrase
#: "1.5-mm^2 elements" is ambiguous between pitch and area; we read it
#: as a 1.5 mm pitch and keep the field configurable.
DEFAULT_ELEMENT_PITCH_MM = 1.5

#: Default sensor geometry: 16 rows x 15 columns.
DEFAULT_ROWS = 16
DEFAULT_COLS = 15


def _as_readonly_f64(values, copy: bool = True) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=copy).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PressureFrame:
    """One pressure distribution sample: rows x cols scalars in kPa, row-major."""

    rows: int
    cols: int
    values: np.ndarray

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DimensionMismatch("rows and cols must be positive",
                                    rows=self.rows, cols=self.cols)
        values = _as_readonly_f64(self.values)
        if values.size != self.rows * self.cols:
            raise DimensionMismatch(
                f"expected {self.rows * self.cols} values, got {values.size}",
                rows=self.rows, cols=self.cols)
        if not np.isfinite(values).all():
            raise NonFiniteValue("frame contains NaN or infinite pressure")
        if (values < 0.0).any():
            raise NegativePressure("frame contains negative pressure")
        object.__setattr__(self, "values", values)

    @classmethod
    def _trusted(cls, rows: int, cols: int, values: np.ndarray) -> "PressureFrame":
        """Wrap an array already known to satisfy the invariants (hot path)."""
        self = object.__new__(cls)
        values.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", values)
        return self

    @property
    def grid(self) -> np.ndarray:
        """Values reshaped to (rows, cols)."""
        return self.values.reshape(self.rows, self.cols)

    def __repr__(self):
        return (f"PressureFrame({self.rows}x{self.cols}, "
                f"max={self.values.max():.3g} kPa)")


def frame_new(rows: int, cols: int, values: Sequence[float]) -> PressureFrame:
    """Validate and build a :class:`PressureFrame` from row-major values."""
    return PressureFrame(rows, cols, values)


@dataclass(frozen=True, eq=False)
class FrameStats:
    min_kpa: float
    max_kpa: float
    mean_kpa: float
    resultant_force_N: float


def frame_stats(frame: PressureFrame,
                element_pitch_mm: float = DEFAULT_ELEMENT_PITCH_MM) -> FrameStats:
    """Summary statistics plus the resultant normal force.

    The resultant treats pitch^2 as the element area: sum of the element
    pressures (kPa -> Pa) times (pitch_mm -> m)^2.
    """
    if not (element_pitch_mm > 0):
        raise ValueError(f"element pitch must be positive, got {element_pitch_mm}")
    v = frame.values
    force = float(v.sum()) * 1000.0 * (element_pitch_mm / 1000.0) ** 2
    return FrameStats(
        min_kpa=float(v.min()),
        max_kpa=float(v.max()),
        mean_kpa=float(v.mean()),
        resultant_force_N=force,
    )


@dataclass(frozen=True, eq=False)
class AxisSpec:
    """One named input axis with strictly increasing sample coordinates."""

    name: str
    unit: str
    samples: np.ndarray

    def __post_init__(self):
        samples = _as_readonly_f64(self.samples)
        if samples.size < 1:
            raise NonIncreasingAxis(f"axis {self.name!r} has no samples")
        if not np.isfinite(samples).all():
            raise NonFiniteValue(f"axis {self.name!r} has non-finite samples")
        if samples.size > 1 and not (np.diff(samples) > 0).all():
            raise NonIncreasingAxis(
                f"axis {self.name!r} samples must be strictly increasing")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return int(self.samples.size)

    @property
    def lo(self) -> float:
        return float(self.samples[0])

    @property
    def hi(self) -> float:
        return float(self.samples[-1])

    def __repr__(self):
        return f"AxisSpec({self.name}[{self.unit}]: {self.samples.tolist()})"


@dataclass(frozen=True, eq=False)
class QueryPoint:
    """A D-vector of input coordinates, one per lattice axis, in axis order."""

    coords: tuple

    def __init__(self, coords: Sequence[float]):
        object.__setattr__(self, "coords", tuple(float(c) for c in coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True, eq=False)
class SampleLattice:
    """The predictive model: one measured frame per node of the axis grid.

    ``frames`` maps a D-tuple of per-axis sample indices to the frame
    measured at those coordinates. The raw constructor checks field-level
    invariants only; run :func:`lattice_validate` (or use the reader /
    builder factories) to check grid completeness and geometry.
    """

    axes: tuple
    frame_rows: int
    frame_cols: int
    frames: Mapping[tuple, PressureFrame]
    element_pitch_mm: float = DEFAULT_ELEMENT_PITCH_MM
    full_scale_kpa: float = FULL_SCALE_KPA

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise NonIncreasingAxis("lattice needs at least one axis")
        if self.frame_rows < 1 or self.frame_cols < 1:
            raise DimensionMismatch("frame geometry must be positive",
                                    rows=self.frame_rows, cols=self.frame_cols)
        if not (self.element_pitch_mm > 0 and math.isfinite(self.element_pitch_mm)):
            raise NonFiniteValue(
                f"element pitch must be positive, got {self.element_pitch_mm}")
        if not (self.full_scale_kpa > 0 and math.isfinite(self.full_scale_kpa)):
            raise NonFiniteValue(
                f"full scale must be positive, got {self.full_scale_kpa}")
        frames = {tuple(int(i) for i in idx): f for idx, f in dict(self.frames).items()}
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "frames", frames)

    # -- geometry helpers --

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(len(ax) for ax in self.axes)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def elements(self) -> int:
        return self.frame_rows * self.frame_cols

    def node_indices(self) -> Iterator[tuple]:
        """All node index tuples in lexicographic order."""
        return product(*(range(n) for n in self.shape))

    def node_coords(self, index: tuple) -> tuple:
        """Physical coordinates of a node index tuple."""
        return tuple(float(ax.samples[i]) for ax, i in zip(self.axes, index))

    @property
    def min_corner(self) -> tuple:
        """Coordinates of the lattice's minimum corner (cold-start default)."""
        return tuple(ax.lo for ax in self.axes)

    @cached_property
    def packed_values(self) -> np.ndarray:
        """Frames packed as a (node_count, rows*cols) C-contiguous array.

        The flat node index is the C-order raveling of the index tuple.
        Built lazily and cached; requires a complete lattice.
        """
        packed = np.empty((self.node_count, self.elements), dtype=np.float64)
        strides = self.node_strides
        for idx, frame in self.frames.items():
            flat = sum(i * s for i, s in zip(idx, strides))
            packed[flat, :] = frame.values
        packed.setflags(write=False)
        return packed

    @property
    def node_strides(self) -> tuple:
        """Per-axis stride of the C-order flat node index."""
        shape = self.shape
        strides = []
        acc = 1
        for n in reversed(shape):
            strides.append(acc)
            acc *= n
        return tuple(reversed(strides))

    def __repr__(self):
        axes = ", ".join(f"{ax.name}:{len(ax)}" for ax in self.axes)
        return (f"SampleLattice({axes}; frames {self.frame_rows}x{self.frame_cols}, "
                f"{len(self.frames)}/{self.node_count} nodes)")


# -- validation findings --

@dataclass(frozen=True)
class MissingNode:
    """A node of the axis product has no frame."""
    index: tuple
    severity: str = field(default="error", repr=False)


@dataclass(frozen=True)
class DuplicateNode:
    """Two inputs map to the same node (reported by readers/builders)."""
    index: tuple
    severity: str = field(default="error", repr=False)


@dataclass(frozen=True)
class GeometryMismatch:
    """A frame's geometry differs from the lattice frame geometry."""
    index: tuple
    rows: int
    cols: int
    severity: str = field(default="error", repr=False)


@dataclass(frozen=True)
class UnexpectedNode:
    """A frame is keyed by an index outside the axis product."""
    index: tuple
    severity: str = field(default="error", repr=False)


@dataclass(frozen=True)
class SaturationWarning:
    """Count of values above full scale; informational, not a defect."""
    count: int
    severity: str = field(default="warning", repr=False)


def lattice_validate(lattice: SampleLattice) -> list:
    """Check lattice invariants; return findings instead of raising.

    The list is empty iff the lattice is structurally valid and nothing is
    saturated. Error-severity findings (missing / unexpected nodes,
    geometry mismatches) mean the invariants are violated; a
    :class:`SaturationWarning` alone still describes a valid lattice.
    Duplicate nodes cannot occur in a mapping-backed lattice, so
    :class:`DuplicateNode` findings arise only from the file reader and
    the capture builder, which check their inputs before construction.
    """
    findings = []
    expected = set(lattice.node_indices())
    present = set(lattice.frames.keys())
    for index in sorted(expected - present):
        findings.append(MissingNode(index))
    for index in sorted(present - expected):
        findings.append(UnexpectedNode(index))
    saturated = 0
    for index in sorted(present):
        frame = lattice.frames[index]
        if (frame.rows, frame.cols) != (lattice.frame_rows, lattice.frame_cols):
            findings.append(GeometryMismatch(index, frame.rows, frame.cols))
        saturated += int((frame.values > lattice.full_scale_kpa).sum())
    if saturated:
        findings.append(SaturationWarning(saturated))
    return findings


def error_findings(findings: Sequence) -> list:
    """Subset of findings that represent invariant violations."""
    return [f for f in findings if f.severity == "error"]
