"""Procedural MNIST-style digit images.

Renders seven-segment digits with per-sample affine jitter, stroke-width
variation, and pixel noise, then (optionally) writes standard IDX files so
the whole ingest pipeline can be exercised without external downloads.
The task is learnable but not trivial: nets of different effective capacity
show genuinely different test behaviour on it.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

# Segment endpoints in a unit box, y pointing down.
_SEGMENTS = {
    "A": ((0.2, 0.15), (0.8, 0.15)),
    "B": ((0.8, 0.15), (0.8, 0.5)),
    "C": ((0.8, 0.5), (0.8, 0.85)),
    "D": ((0.2, 0.85), (0.8, 0.85)),
    "E": ((0.2, 0.5), (0.2, 0.85)),
    "F": ((0.2, 0.15), (0.2, 0.5)),
    "G": ((0.2, 0.5), (0.8, 0.5)),
}

_DIGIT_SEGMENTS = {
    0: "ABCDEF", 1: "BC", 2: "ABGED", 3: "ABGCD", 4: "FGBC",
    5: "AFGCD", 6: "AFGECD", 7: "ABC", 8: "ABCDEFG", 9: "ABCDFG",
}

SIZE = 28


def _segment_distance(px, py, p0, p1):
    """Distance from each grid point to the segment p0-p1."""
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    length2 = dx * dx + dy * dy
    t = ((px - x0) * dx + (py - y0) * dy) / length2
    t = np.clip(t, 0.0, 1.0)
    cx, cy = x0 + t * dx, y0 + t * dy
    return np.hypot(px - cx, py - cy)


def render_digit(digit, rng, noise=0.05):
    """One jittered 28x28 grayscale digit in [0, 1]."""
    if digit not in _DIGIT_SEGMENTS:
        raise ValueError(f"digit must be 0-9, got {digit!r}")
    angle = rng.uniform(-0.25, 0.25)
    scale = rng.uniform(0.75, 1.05)
    tx, ty = rng.uniform(-0.08, 0.08, size=2)
    width = rng.uniform(0.045, 0.09)

    # Pixel centers mapped back into the glyph's unit box (inverse affine
    # about the box center).
    grid = (np.arange(SIZE) + 0.5) / SIZE
    px, py = np.meshgrid(grid, grid, indexing="xy")
    cx = px - 0.5 - tx
    cy = py - 0.5 - ty
    cos_a, sin_a = np.cos(-angle), np.sin(-angle)
    ux = (cos_a * cx - sin_a * cy) / scale + 0.5
    uy = (sin_a * cx + cos_a * cy) / scale + 0.5

    img = np.zeros((SIZE, SIZE))
    aa = 1.5 / SIZE
    for name in _DIGIT_SEGMENTS[digit]:
        d = _segment_distance(ux, uy, *_SEGMENTS[name])
        img = np.maximum(img, np.clip(1.0 - (d - width) / aa, 0.0, 1.0))
    img += rng.normal(0.0, noise, img.shape)
    return np.clip(img, 0.0, 1.0)


def make_digit_dataset(n, seed, noise=0.05):
    """n digits with uniform random classes; returns (images, labels).

    Images are float32 (n, 1, 28, 28) in [0, 1]; labels are int64.
    """
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 10, size=n, dtype=np.int64)
    images = np.empty((n, 1, SIZE, SIZE), dtype=np.float32)
    for i, digit in enumerate(labels):
        images[i, 0] = render_digit(int(digit), rng, noise=noise)
    return images, labels


def write_idx(images, labels, images_path, labels_path):
    """Write images/labels as big-endian IDX files (pixels quantized to uint8)."""
    images = np.asarray(images)
    if images.ndim == 4:
        images = images[:, 0]
    n, rows, cols = images.shape
    u8 = np.clip(np.round(images * 255.0), 0, 255).astype(np.uint8)
    with open(images_path, "wb") as f:
        f.write(struct.pack(">iiii", 0x00000803, n, rows, cols))
        f.write(u8.tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">ii", 0x00000801, n))
        f.write(np.asarray(labels, dtype=np.uint8).tobytes())
    return Path(images_path), Path(labels_path)


def write_digit_idx_pair(n, seed, out_dir, prefix, noise=0.05):
    """Render n digits and drop them as an IDX pair under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images, labels = make_digit_dataset(n, seed, noise=noise)
    return write_idx(images, labels,
                     out_dir / f"{prefix}-images-idx3-ubyte",
                     out_dir / f"{prefix}-labels-idx1-ubyte")
