"""Per-element multilinear interpolation over a sample lattice.

This is the predictive model: given a lattice of measured frames over D
input axes, a query at coordinates x = (x_1, ..., x_D) returns, for every
frame element independently, the convex blend of the 2^D frames at the
corners of the grid cell containing x. Along each axis the blend is
linear, so for D = 2 the result is classic bilinear interpolation of
each element over (displacement, angle); arbitrary D supports richer
input spaces (e.g. three translations plus three rotations) with the
same kernel.

Conventions, pinned once here:

* Cells are right-open at interior samples: a coordinate equal to an
  interior sample x_j locates cell [x_j, x_{j+1}) with blend t = 0; the
  final sample uses the last cell with t = 1. This makes cell location
  total and deterministic, and queries at lattice nodes reproduce the
  stored frames exactly (blend weights collapse to 0/1).
* Out-of-range coordinates are clamped to the axis range, never
  extrapolated (linear extrapolation can go negative, which pressure
  cannot). The per-axis clamp decision is reported alongside the frame.
* Corner gathering is lexicographic over axes and weight factors
  multiply in axis order; the result is order-independent up to
  floating-point reassociation, so this choice merely pins reproducible
  64-bit output. Both kernel backends follow it bit-identically.

Engines are immutable after construction and safe for unlimited
concurrent callers (per-thread scratch buffers).
"""

from __future__ import annotations

import math
import threading
import weakref
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import _kernels_py
from .core import AxisSpec, PressureFrame, QueryPoint, SampleLattice
from .errors import ArityMismatch, NonFiniteCoordinate

try:
    from . import _kernels as _kernels_native
except ImportError:  # extension not built; numpy fallback only
    _kernels_native = None


def available_backends() -> tuple:
    """Kernel backends usable in this installation, preferred first."""
    if _kernels_native is not None:
        return ("native", "python")
    return ("python",)


class ClampFlag(str, Enum):
    BELOW = "below"
    INSIDE = "inside"
    ABOVE = "above"


@dataclass(frozen=True)
class CellLocation:
    """Bracketing cell of one coordinate on one axis.

    ``i1 == i0`` (with t = 0) marks a degenerate or clamped location;
    otherwise ``i1 == i0 + 1`` and t is the normalized offset of the
    clamped coordinate within the cell.
    """
    axis: int
    i0: int
    i1: int
    t: float


@dataclass(frozen=True)
class AxisClamp:
    """Clamp outcome for one axis: flag plus the coordinate actually used."""
    axis: str
    flag: ClampFlag
    clamped: float


@dataclass(frozen=True)
class ClampReport:
    """Per-axis clamp outcomes for one query."""
    entries: tuple

    @property
    def any_clamped(self) -> bool:
        return any(e.flag is not ClampFlag.INSIDE for e in self.entries)

    @property
    def clamped_coords(self) -> tuple:
        return tuple(e.clamped for e in self.entries)

    def flags_by_axis(self) -> dict:
        return {e.axis: e.flag.value for e in self.entries}


_INSIDE, _BELOW, _ABOVE = 0, -1, 1


def _locate(samples: Sequence[float], x: float):
    """Locate ``x`` on a strictly increasing sample vector.

    Returns (i0, i1, t, flag) with flag one of the module-level location
    codes. Raises NonFiniteCoordinate for NaN/inf.
    """
    if not math.isfinite(x):
        raise NonFiniteCoordinate(f"coordinate {x!r} is not finite")
    n = len(samples)
    lo = samples[0]
    hi = samples[n - 1]
    if x < lo:
        return 0, 0, 0.0, _BELOW
    if x > hi:
        return n - 1, n - 1, 0.0, _ABOVE
    if n == 1:
        return 0, 0, 0.0, _INSIDE
    if x == hi:
        return n - 2, n - 1, 1.0, _INSIDE
    j = bisect_right(samples, x)
    i0 = j - 1
    return i0, j, (x - samples[i0]) / (samples[j] - samples[i0]), _INSIDE

_FLAGS = {_BELOW: ClampFlag.BELOW, _INSIDE: ClampFlag.INSIDE, _ABOVE: ClampFlag.ABOVE}


def locate_cell(axis: AxisSpec, x: float, axis_index: int = 0) -> tuple:
    """Public cell location for one axis; returns (CellLocation, ClampFlag).

    ``axis_index`` tags the location with the axis's position in a
    multi-axis query and does not affect the result.
    """
    samples = tuple(float(s) for s in axis.samples)
    i0, i1, t, flag = _locate(samples, x)
    return CellLocation(axis=axis_index, i0=i0, i1=i1, t=t), _FLAGS[flag]


class Interpolator:
    """Query engine bound to one lattice and one kernel backend.

    ``backend`` is ``"auto"`` (native if compiled, else python),
    ``"native"``, or ``"python"``. The engine packs the lattice frames
    once; queries then cost one cell location per axis plus one kernel
    call.
    """

    def __init__(self, lattice: SampleLattice, backend: str = "auto"):
        self.lattice = lattice
        if backend == "auto":
            backend = available_backends()[0]
        if backend == "native":
            if _kernels_native is None:
                raise RuntimeError(
                    "native kernel extension is not built; "
                    "install the package or use backend='python'")
            self._blend = _kernels_native.blend_corners
        elif backend == "python":
            self._blend = _kernels_py.blend_corners
        else:
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend

        self._axis_names = tuple(ax.name for ax in lattice.axes)
        self._samples = tuple(tuple(float(s) for s in ax.samples)
                              for ax in lattice.axes)
        self._packed = lattice.packed_values
        self._strides = np.asarray(lattice.node_strides, dtype=np.intp)
        self._ndim = lattice.ndim
        self._elements = lattice.elements
        self._tls = threading.local()

    def _scratch(self):
        buf = getattr(self._tls, "buf", None)
        if buf is None:
            buf = (np.empty(self._ndim, dtype=np.intp),
                   np.empty(self._ndim, dtype=np.intp),
                   np.empty(self._ndim, dtype=np.float64))
            self._tls.buf = buf
        return buf

    def query(self, point: QueryPoint) -> tuple:
        """Interpolated frame plus clamp report at one query point."""
        coords = point.coords if isinstance(point, QueryPoint) else tuple(point)
        if len(coords) != self._ndim:
            raise ArityMismatch(
                f"query has {len(coords)} coordinates, lattice has "
                f"{self._ndim} axes")
        lo, hi, t = self._scratch()
        entries = []
        for k, x in enumerate(coords):
            samples = self._samples[k]
            i0, i1, tk, flag = _locate(samples, x)
            lo[k] = i0
            hi[k] = i1
            t[k] = tk
            if flag == _BELOW:
                entries.append(AxisClamp(self._axis_names[k], ClampFlag.BELOW,
                                         samples[0]))
            elif flag == _ABOVE:
                entries.append(AxisClamp(self._axis_names[k], ClampFlag.ABOVE,
                                         samples[-1]))
            else:
                entries.append(AxisClamp(self._axis_names[k], ClampFlag.INSIDE,
                                         float(x)))
        out = np.empty(self._elements, dtype=np.float64)
        self._blend(self._packed, self._strides, lo, hi, t, out)
        frame = PressureFrame._trusted(self.lattice.frame_rows,
                                       self.lattice.frame_cols, out)
        return frame, ClampReport(tuple(entries))

    def query_batch(self, points: Iterable) -> list:
        """Element-wise identical to mapping :meth:`query`; order preserved.

        The first failing point aborts with its position attached.
        """
        results = []
        for i, point in enumerate(points):
            try:
                results.append(self.query(point))
            except (ArityMismatch, NonFiniteCoordinate) as exc:
                raise type(exc)(f"batch point {i}: {exc}", index=i) from exc
        return results


_engines = weakref.WeakKeyDictionary()


def engine_for(lattice: SampleLattice, backend: str = "auto") -> Interpolator:
    """Cached engine per (lattice, backend); lattices are immutable."""
    per_lattice = _engines.get(lattice)
    if per_lattice is None:
        per_lattice = {}
        _engines[lattice] = per_lattice
    engine = per_lattice.get(backend)
    if engine is None:
        engine = Interpolator(lattice, backend)
        per_lattice[backend] = engine
    return engine


def query(lattice: SampleLattice, point: QueryPoint) -> tuple:
    """Interpolate one frame; see :meth:`Interpolator.query`."""
    return engine_for(lattice).query(point)


def query_batch(lattice: SampleLattice, points: Iterable) -> list:
    """Interpolate many frames; see :meth:`Interpolator.query_batch`."""
    return engine_for(lattice).query_batch(points)
