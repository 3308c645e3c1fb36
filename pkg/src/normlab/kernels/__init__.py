"""Convolution patch kernels with a compiled core and a numpy fallback.

The Cython extension is picked at import time when it is built; otherwise the
pure-numpy implementation takes over transparently.  Set the environment
variable ``NORMLAB_PURE_PYTHON=1`` to force the fallback (used by the kernel
benchmark and the cross-backend tests).
"""

import os

from normlab.kernels import fallback

if os.environ.get("NORMLAB_PURE_PYTHON") == "1":
    _impl = fallback
    BACKEND = "numpy"
else:
    try:
        from normlab.kernels import _convkernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = fallback
        BACKEND = "numpy"

im2col = _impl.im2col
col2im = _impl.col2im


def conv_output_size(h, w, kh, kw, sh, sw):
    """Spatial extents of a valid (unpadded) convolution."""
    if kh > h or kw > w:
        raise ValueError(f"kernel {kh}x{kw} larger than input {h}x{w}")
    return (h - kh) // sh + 1, (w - kw) // sw + 1


__all__ = ["BACKEND", "im2col", "col2im", "conv_output_size", "fallback"]
