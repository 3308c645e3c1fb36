# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled patch gather/scatter kernels for valid (unpadded) 2-D convolution.

These two routines are the hot inner loops of conv forward/backward: the
surrounding GEMMs are delegated to BLAS via numpy either way.  A pure-numpy
implementation of the same layout lives in :mod:`normlab.kernels.fallback`;
the accumulation order of ``col2im`` matches it so both backends agree.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef fused real:
    float
    double


def im2col(const real[:, :, :, ::1] x, Py_ssize_t kh, Py_ssize_t kw,
           Py_ssize_t sh, Py_ssize_t sw):
    """Gather k-by-k patches of ``x`` (B, C, H, W) into (B, C*kh*kw, HO*WO)."""
    cdef Py_ssize_t B = x.shape[0]
    cdef Py_ssize_t C = x.shape[1]
    cdef Py_ssize_t H = x.shape[2]
    cdef Py_ssize_t W = x.shape[3]
    cdef Py_ssize_t ho = (H - kh) // sh + 1
    cdef Py_ssize_t wo = (W - kw) // sw + 1

    if real is float:
        dtype = np.float32
    else:
        dtype = np.float64
    out = np.empty((B, C * kh * kw, ho * wo), dtype=dtype)
    cdef real[:, :, ::1] cols = out

    cdef Py_ssize_t b, c, i, j, oh, ow, row
    with nogil:
        for b in range(B):
            for c in range(C):
                for i in range(kh):
                    for j in range(kw):
                        row = (c * kh + i) * kw + j
                        for oh in range(ho):
                            for ow in range(wo):
                                cols[b, row, oh * wo + ow] = x[b, c, oh * sh + i, ow * sw + j]
    return out


def col2im(const real[:, :, ::1] cols, Py_ssize_t C, Py_ssize_t H, Py_ssize_t W,
           Py_ssize_t kh, Py_ssize_t kw, Py_ssize_t sh, Py_ssize_t sw):
    """Scatter-add columns (B, C*kh*kw, HO*WO) back onto a (B, C, H, W) image.

    Exact adjoint of :func:`im2col`; overlapping patch positions accumulate.
    """
    cdef Py_ssize_t B = cols.shape[0]
    cdef Py_ssize_t ho = (H - kh) // sh + 1
    cdef Py_ssize_t wo = (W - kw) // sw + 1

    if real is float:
        dtype = np.float32
    else:
        dtype = np.float64
    out = np.zeros((B, C, H, W), dtype=dtype)
    cdef real[:, :, :, ::1] x = out

    cdef Py_ssize_t b, c, i, j, oh, ow, row
    with nogil:
        for b in range(B):
            for c in range(C):
                for i in range(kh):
                    for j in range(kw):
                        row = (c * kh + i) * kw + j
                        for oh in range(ho):
                            for ow in range(wo):
                                x[b, c, oh * sh + i, ow * sw + j] += cols[b, row, oh * wo + ow]
    return out
