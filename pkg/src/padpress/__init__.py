"""Data-driven finger-pad pressure distribution rendering.

Measured pressure frames sampled on a (displacement x contact-angle)
lattice are interpolated per element, in real time, at arbitrary
in-range inputs. The package covers the whole pipeline: capture CSV
ingestion and baseline calibration, the lattice model file, the
multilinear query engine (compiled kernel with a pure-Python fallback),
a latency benchmark, a WebSocket streaming service, and a CLI.
"""

from .core import (
    AxisSpec,
    FrameStats,
    PressureFrame,
    QueryPoint,
    SampleLattice,
    frame_new,
    frame_stats,
    lattice_validate,
)
from .errors import PadpressError
from .ingest import (
    CaptureSession,
    RawSample,
    average_hold,
    build_lattice,
    detect_baseline,
    parse_capture,
    write_capture,
)
from .interp import (
    ClampFlag,
    ClampReport,
    Interpolator,
    available_backends,
    locate_cell,
    query,
    query_batch,
)
from .lattice_io import read_lattice, write_lattice

__version__ = "0.1.0"

__all__ = [
    "AxisSpec",
    "CaptureSession",
    "ClampFlag",
    "ClampReport",
    "FrameStats",
    "Interpolator",
    "PadpressError",
    "PressureFrame",
    "QueryPoint",
    "RawSample",
    "SampleLattice",
    "available_backends",
    "average_hold",
    "build_lattice",
    "detect_baseline",
    "frame_new",
    "frame_stats",
    "lattice_validate",
    "locate_cell",
    "parse_capture",
    "query",
    "query_batch",
    "read_lattice",
    "write_capture",
    "write_lattice",
]
