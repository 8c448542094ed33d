# cython: language_level=3
"""Native blend kernel for the interpolation hot path.

Mirrors ``_kernels_py.blend_corners`` operation-for-operation; compiled
with -ffp-contract=off so both backends stay bit-identical.
"""

import numpy as np

cimport numpy as cnp

BACKEND_NAME = "native"


def blend_corners(const double[:, ::1] packed, const cnp.intp_t[::1] strides,
                  const cnp.intp_t[::1] lo, const cnp.intp_t[::1] hi,
                  const double[::1] t, double[::1] out):
    """Accumulate the 2^D corner blend for one query into ``out``.

    See the fallback in ``_kernels_py`` for the argument contract.
    """
    cdef Py_ssize_t d = t.shape[0]
    cdef Py_ssize_t n_elem = out.shape[0]
    cdef Py_ssize_t n_corner = 1 << d
    cdef Py_ssize_t corner, k, e, flat
    cdef double w

    for corner in range(n_corner):
        w = 1.0
        flat = 0
        for k in range(d):
            if (corner >> (d - 1 - k)) & 1:
                w *= t[k]
                flat += hi[k] * strides[k]
            else:
                w *= 1.0 - t[k]
                flat += lo[k] * strides[k]
        if corner == 0:
            for e in range(n_elem):
                out[e] = w * packed[flat, e]
        else:
            for e in range(n_elem):
                out[e] = out[e] + w * packed[flat, e]
