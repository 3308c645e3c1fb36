"""Patch-kernel agreement between backends, plus the adjoint identity."""

import numpy as np
import pytest

from normlab.kernels import BACKEND, col2im, conv_output_size, fallback, im2col

try:
    from normlab.kernels import _convkernels as compiled
except ImportError:
    compiled = None

SHAPES = [
    (2, 1, 6, 6, 3, 3, 1),
    (3, 2, 8, 7, 3, 2, 1),
    (2, 3, 9, 9, 3, 3, 2),
    (1, 4, 5, 5, 5, 5, 1),
    (4, 1, 10, 6, 2, 4, 2),
]


def naive_im2col(x, kh, kw, sh, sw):
    b, c, h, w = x.shape
    ho = (h - kh) // sh + 1
    wo = (w - kw) // sw + 1
    cols = np.zeros((b, c * kh * kw, ho * wo), dtype=x.dtype)
    for n in range(b):
        for ch in range(c):
            for i in range(kh):
                for j in range(kw):
                    row = ch * kh * kw + i * kw + j
                    for oy in range(ho):
                        for ox in range(wo):
                            cols[n, row, oy * wo + ox] = \
                                x[n, ch, oy * sh + i, ox * sw + j]
    return cols


@pytest.mark.parametrize("shape", SHAPES)
def test_im2col_matches_naive_gather(shape):
    b, c, h, w, kh, kw, s = shape
    x = np.random.default_rng(1).normal(size=(b, c, h, w)).astype(np.float32)
    got = np.asarray(im2col(x, kh, kw, s, s))
    assert np.array_equal(got, naive_im2col(x, kh, kw, s, s))


@pytest.mark.parametrize("shape", SHAPES)
def test_backends_agree_bitwise(shape):
    if compiled is None:
        pytest.skip("compiled backend not built")
    b, c, h, w, kh, kw, s = shape
    rng = np.random.default_rng(2)
    for dtype in (np.float32, np.float64):
        x = np.ascontiguousarray(rng.normal(size=(b, c, h, w)), dtype=dtype)
        a = np.asarray(compiled.im2col(x, kh, kw, s, s))
        f = fallback.im2col(x, kh, kw, s, s)
        assert np.array_equal(a, f)
        grad = np.ascontiguousarray(rng.normal(size=a.shape), dtype=dtype)
        ai = np.asarray(compiled.col2im(grad, c, h, w, kh, kw, s, s))
        fi = fallback.col2im(grad, c, h, w, kh, kw, s, s)
        assert np.array_equal(ai, fi)


def test_col2im_is_adjoint_of_im2col():
    # <im2col(x), g> == <x, col2im(g)> pins the scatter to the exact
    # transpose of the gather, catching index bugs a shape check misses.
    rng = np.random.default_rng(3)
    for b, c, h, w, kh, kw, s in SHAPES:
        x = rng.normal(size=(b, c, h, w))
        cols = np.asarray(im2col(x, kh, kw, s, s))
        g = rng.normal(size=cols.shape)
        lhs = float(np.sum(cols * g))
        rhs = float(np.sum(x * np.asarray(col2im(g, c, h, w, kh, kw, s, s))))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_read_only_input_accepted():
    x = np.ascontiguousarray(
        np.random.default_rng(4).normal(size=(2, 3, 8, 8)), dtype=np.float32)
    x.flags.writeable = False
    cols = np.asarray(im2col(x, 3, 3, 1, 1))
    cols2 = np.ascontiguousarray(cols)
    cols2.flags.writeable = False
    np.asarray(col2im(cols2, 3, 8, 8, 3, 3, 1, 1))


def test_conv_output_size():
    assert conv_output_size(28, 28, 5, 5, 1, 1) == (24, 24)
    assert conv_output_size(32, 32, 3, 3, 2, 2) == (15, 15)
    with pytest.raises(ValueError):
        conv_output_size(4, 4, 5, 5, 1, 1)


def test_backend_name_is_declared():
    assert BACKEND in ("cython", "numpy")
