"""Pure-Python (numpy) fallback for the blend kernel.

Selected at import time by :mod:`padpress.interp` when the compiled
extension is unavailable. The corner enumeration, weight products, and
accumulation order are pinned to match ``_kernels.pyx`` exactly, so both
backends produce bit-identical output (the extension is compiled with
FP contraction disabled for the same reason).
"""

import numpy as np

BACKEND_NAME = "python"


def blend_corners(packed, strides, lo, hi, t, out):
    """Accumulate the 2^D corner blend for one query into ``out``.

    packed  : (node_count, elements) float64, C-contiguous
    strides : (D,) intp, C-order flat-index stride per axis
    lo, hi  : (D,) intp, per-axis lower/upper sample indices
    t       : (D,) float64, per-axis blend fractions in [0, 1]
    out     : (elements,) float64, overwritten

    Corners are enumerated lexicographically over axes (axis 0 most
    significant); weight factors multiply in axis order.
    """
    d = len(t)
    scratch = np.empty_like(out)
    for corner in range(1 << d):
        w = 1.0
        flat = 0
        for k in range(d):
            if (corner >> (d - 1 - k)) & 1:
                w *= t[k]
                flat += hi[k] * strides[k]
            else:
                w *= 1.0 - t[k]
                flat += lo[k] * strides[k]
        row = packed[flat]
        if corner == 0:
            np.multiply(row, w, out=out)
        else:
            np.multiply(row, w, out=scratch)
            np.add(out, scratch, out=out)
