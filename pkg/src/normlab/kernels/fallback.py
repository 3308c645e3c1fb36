"""Pure-numpy patch gather/scatter, used when the compiled kernels are absent.

Produces the same column layout as the Cython module; ``col2im`` accumulates
in the same (kernel-row, kernel-col) order so results match bit-for-bit on
identical inputs.
"""

import numpy as np
from numpy.lib.stride_tricks import as_strided


def im2col(x, kh, kw, sh, sw):
    """Gather k-by-k patches of ``x`` (B, C, H, W) into (B, C*kh*kw, HO*WO)."""
    B, C, H, W = x.shape
    ho = (H - kh) // sh + 1
    wo = (W - kw) // sw + 1
    sb, sc, srow, scol = x.strides
    patches = as_strided(
        x,
        shape=(B, C, kh, kw, ho, wo),
        strides=(sb, sc, srow, scol, sh * srow, sw * scol),
        writeable=False,
    )
    return patches.reshape(B, C * kh * kw, ho * wo)


def col2im(cols, C, H, W, kh, kw, sh, sw):
    """Scatter-add columns (B, C*kh*kw, HO*WO) back onto a (B, C, H, W) image."""
    B = cols.shape[0]
    ho = (H - kh) // sh + 1
    wo = (W - kw) // sw + 1
    x = np.zeros((B, C, H, W), dtype=cols.dtype)
    patches = cols.reshape(B, C, kh, kw, ho, wo)
    for i in range(kh):
        for j in range(kw):
            x[:, :, i : i + sh * ho : sh, j : j + sw * wo : sw] += patches[:, :, i, j]
    return x
