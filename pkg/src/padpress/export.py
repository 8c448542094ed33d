"""Frame export formats used by the CLI query command."""

from __future__ import annotations

import numpy as np

from .core import PressureFrame
from .interp import ClampReport

#: Text output carries 9 significant digits: exact enough to round-trip
#: the sub-100-kPa value range at the printed precision.
CSV_FLOAT_FORMAT = "%.9g"


def frame_to_csv(frame: PressureFrame) -> str:
    """rows x cols grid of kPa values, one row per line."""
    grid = frame.grid
    lines = [",".join(CSV_FLOAT_FORMAT % v for v in row) for row in grid]
    return "\n".join(lines) + "\n"


def parse_frame_csv(text: str) -> PressureFrame:
    rows = [line.split(",") for line in text.strip().splitlines()]
    values = np.array([[float(tok) for tok in row] for row in rows])
    return PressureFrame(values.shape[0], values.shape[1], values.reshape(-1))


def frame_to_pgm(frame: PressureFrame, full_scale_kpa: float) -> str:
    """8-bit ASCII PGM: 0 kPa -> black, full scale -> white, clipped above.

    The mapping is monotone in pressure, which is all a viewer needs;
    color maps are the viewer's concern.
    """
    scaled = np.clip(frame.grid / full_scale_kpa, 0.0, 1.0)
    pixels = np.rint(scaled * 255).astype(np.uint8)
    lines = [f"P2", f"{frame.cols} {frame.rows}", "255"]
    lines.extend(" ".join(str(p) for p in row) for row in pixels)
    return "\n".join(lines) + "\n"


def frame_to_json_dict(frame: PressureFrame, report: ClampReport) -> dict:
    """Frame-message shape minus the transport fields (seq, t_us, compute_us)."""
    return {
        "query": {e.axis: e.clamped for e in report.entries},
        "clamped": report.flags_by_axis(),
        "rows": frame.rows,
        "cols": frame.cols,
        "values": frame.values.tolist(),
    }
