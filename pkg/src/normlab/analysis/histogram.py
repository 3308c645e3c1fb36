"""Distribution of the network's output for the most likely class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from normlab.engine.network import forward
from normlab.normalize.layerwise import NormalizedNetwork


@dataclass(frozen=True)
class OutputHistogram:
    """Histogram plus mean/std of max_c f_c(x) over a dataset."""

    mean: float
    std: float
    bin_edges: np.ndarray
    counts: np.ndarray
    n_examples: int


def output_histogram(net, dataset, bins=50, batch_size=256):
    """Histogram the per-example maximum logit.

    Normalized nets put this statistic a few percent above 0 while raw
    trained nets sit orders of magnitude higher, which is the scale
    mismatch that motivates normalizing before comparing losses.
    """
    if isinstance(net, NormalizedNetwork):
        net = net.net
    if bins < 1:
        raise ValueError("bins must be >= 1")
    n = len(dataset)
    values = np.empty(n, dtype=np.float64)
    for start in range(0, n, batch_size):
        stop = min(start + batch_size, n)
        x = dataset.images[start:stop].astype(net.dtype, copy=False)
        values[start:stop] = forward(net, x, mode="eval").max(axis=1)
    counts, edges = np.histogram(values, bins=bins)
    return OutputHistogram(mean=float(values.mean()),
                           std=float(values.std()),
                           bin_edges=edges, counts=counts, n_examples=n)
