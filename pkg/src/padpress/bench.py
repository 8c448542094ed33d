"""Per-query latency benchmark for the interpolation engine.

Times individual calls through the public query path (cell location,
kernel blend, result wrapping) on a seeded stream of uniform in-range
points, and reports distribution statistics against the 10 microsecond
real-time budget. The point sequence is deterministic per seed;
latencies of course are not.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import QueryPoint, SampleLattice
from .interp import Interpolator, available_backends

#: Real-time budget per query, from the reference system's measurements.
TARGET_US = 10.0


@dataclass(frozen=True)
class BenchReport:
    backend: str
    queries: int
    min_us: float = 0.0
    mean_us: float = 0.0
    p50_us: float = 0.0
    p99_us: float = 0.0
    max_us: float = 0.0
    target_us: float = TARGET_US
    pinned: bool = False
    notes: tuple = field(default_factory=tuple)

    @property
    def target_met(self) -> bool:
        return self.queries > 0 and self.mean_us < self.target_us

    def as_dict(self) -> dict:
        return {
            "backend": self.backend,
            "queries": self.queries,
            "min_us": self.min_us,
            "mean_us": self.mean_us,
            "p50_us": self.p50_us,
            "p99_us": self.p99_us,
            "max_us": self.max_us,
            "target_us": self.target_us,
            "target_met": self.target_met,
            "pinned": self.pinned,
            "notes": list(self.notes),
        }


def sample_points(lattice: SampleLattice, n: int, seed: int) -> np.ndarray:
    """(n, D) uniform in-range coordinates, deterministic per seed."""
    rng = np.random.default_rng(seed)
    cols = [rng.uniform(ax.lo, ax.hi, size=n) if ax.hi > ax.lo
            else np.full(n, ax.lo) for ax in lattice.axes]
    return np.column_stack(cols) if cols else np.empty((n, 0))


def _pin_to_one_core() -> tuple:
    """Try to pin this process to a single core; returns (pinned, undo)."""
    try:
        allowed = os.sched_getaffinity(0)
        target = min(allowed)
        os.sched_setaffinity(0, {target})
        return True, lambda: os.sched_setaffinity(0, allowed)
    except (AttributeError, OSError):
        return False, lambda: None


def run_bench(lattice: SampleLattice, n: int = 100_000, seed: int = 0,
              backend: str = "auto", pin: bool = True,
              warmup: Optional[int] = None) -> BenchReport:
    """Benchmark one backend; see module docstring."""
    engine = Interpolator(lattice, backend)
    notes = []
    if n <= 0:
        return BenchReport(backend=engine.backend, queries=0,
                           notes=("no queries requested",))

    points = [QueryPoint(row) for row in sample_points(lattice, n, seed)]
    if warmup is None:
        warmup = min(1000, n)
    pinned = False
    undo = lambda: None
    if pin:
        pinned, undo = _pin_to_one_core()
        if not pinned:
            notes.append("core pinning unavailable on this platform")
    try:
        for p in points[:warmup]:
            engine.query(p)
        elapsed = np.empty(n, dtype=np.float64)
        perf = time.perf_counter_ns
        q = engine.query
        for i, p in enumerate(points):
            t0 = perf()
            q(p)
            elapsed[i] = perf() - t0
    finally:
        undo()

    us = elapsed / 1000.0
    p50, p99 = np.percentile(us, [50.0, 99.0])
    return BenchReport(
        backend=engine.backend,
        queries=n,
        min_us=float(us.min()),
        mean_us=float(us.mean()),
        p50_us=float(p50),
        p99_us=float(p99),
        max_us=float(us.max()),
        pinned=pinned,
        notes=tuple(notes),
    )


def run_bench_suite(lattice: SampleLattice, n: int = 100_000, seed: int = 0,
                    backend: str = "auto", pin: bool = True) -> list:
    """Run one backend, or both for a side-by-side comparison."""
    if backend == "both":
        return [run_bench(lattice, n, seed, b, pin)
                for b in available_backends()]
    return [run_bench(lattice, n, seed, backend, pin)]


def format_report(report: BenchReport) -> str:
    if report.queries == 0:
        return f"[{report.backend}] no queries run"
    status = "met" if report.target_met else "MISSED"
    pinning = "pinned to one core" if report.pinned else "not pinned"
    lines = [
        f"[{report.backend}] {report.queries} queries ({pinning})",
        (f"  per-query latency: min {report.min_us:.3f} us | "
         f"mean {report.mean_us:.3f} us | p50 {report.p50_us:.3f} us | "
         f"p99 {report.p99_us:.3f} us | max {report.max_us:.3f} us"),
        f"  {report.target_us:.0f} us real-time target: {status}",
    ]
    lines.extend(f"  note: {n}" for n in report.notes)
    return "\n".join(lines)
