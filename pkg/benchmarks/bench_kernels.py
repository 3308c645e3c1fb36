"""Time the compiled patch kernels against the numpy fallback.

Runs im2col and col2im on the layer shapes the catalog networks actually
use, checks both backends agree bit for bit, and prints per-call timings
with the speedup.  Run as ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import time

import numpy as np

from normlab.kernels import conv_output_size, fallback

try:
    from normlab.kernels import _convkernels as compiled
except ImportError:
    compiled = None

# (label, batch, channels, height, width, kh, kw, stride)
SHAPES = [
    ("28x28 5x5 s1 (digit conv1)", 64, 1, 28, 28, 5, 5, 1),
    ("24x24 5x5 s1 (digit conv2)", 64, 34, 24, 24, 5, 5, 1),
    ("32x32 5x5 s1 (image conv1)", 64, 3, 32, 32, 5, 5, 1),
    ("32x32 3x3 s2 (strided conv1)", 64, 3, 32, 32, 3, 3, 2),
    ("15x15 3x3 s2 (strided conv2)", 64, 32, 15, 15, 3, 3, 2),
]


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_shape(label, b, c, h, w, kh, kw, stride, repeats, dtype):
    rng = np.random.default_rng(0)
    x = np.ascontiguousarray(rng.normal(size=(b, c, h, w)), dtype=dtype)
    ho, wo = conv_output_size(h, w, kh, kw, stride, stride)
    cols_ref = np.ascontiguousarray(fallback.im2col(x, kh, kw, stride, stride))
    grad = np.ascontiguousarray(rng.normal(size=cols_ref.shape), dtype=dtype)

    rows = []
    for name, mod in (("numpy", fallback), ("cython", compiled)):
        if mod is None:
            continue
        cols = np.asarray(mod.im2col(x, kh, kw, stride, stride))
        image = np.asarray(mod.col2im(grad, c, h, w, kh, kw, stride, stride))
        if not np.array_equal(cols, cols_ref):
            raise AssertionError(f"{name} im2col disagrees on {label}")
        if not np.array_equal(image, fallback.col2im(grad, c, h, w, kh, kw,
                                                     stride, stride)):
            raise AssertionError(f"{name} col2im disagrees on {label}")
        gather = best_of(lambda: mod.im2col(x, kh, kw, stride, stride),
                         repeats)
        scatter = best_of(lambda: mod.col2im(grad, c, h, w, kh, kw,
                                             stride, stride), repeats)
        rows.append((name, gather, scatter))

    print(f"\n{label}  batch={b} cols=({c * kh * kw}, {ho * wo})")
    for name, gather, scatter in rows:
        print(f"  {name:<7} im2col {gather * 1e3:8.3f} ms   "
              f"col2im {scatter * 1e3:8.3f} ms")
    if len(rows) == 2:
        print(f"  speedup im2col x{rows[0][1] / rows[1][1]:.2f}   "
              f"col2im x{rows[0][2] / rows[1][2]:.2f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repeats per kernel (best-of)")
    parser.add_argument("--dtype", choices=["f4", "f8"], default="f4")
    args = parser.parse_args()

    dtype = np.float32 if args.dtype == "f4" else np.float64
    if compiled is None:
        print("compiled backend not built; timing the numpy fallback only")
    for shape in SHAPES:
        bench_shape(*shape, repeats=args.repeats, dtype=dtype)


if __name__ == "__main__":
    main()
