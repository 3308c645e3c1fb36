"""Deterministic loss/error evaluation of a network over a dataset."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from normlab.engine.losses import crossentropy_per_example
from normlab.engine.network import forward
from normlab.normalize.layerwise import NormalizedNetwork


@dataclass(frozen=True)
class EvalReport:
    """Cross-entropy loss and classification error on one dataset."""

    dataset_id: str
    loss: float
    error: float
    n_examples: int

    def __post_init__(self):
        if not np.isfinite(self.loss):
            raise ValueError("evaluation produced a non-finite loss")
        if not 0.0 <= self.error <= 1.0:
            raise ValueError(f"error {self.error} outside [0, 1]")


def dataset_id(dataset):
    """Stable identifier: source digest when known, else the source name."""
    prov = dataset.provenance
    return prov.source_digest or prov.source


def evaluate(net, dataset, batch_size=256):
    """Mean cross-entropy and classification error in eval mode.

    Accepts a plain Network or a NormalizedNetwork.  Per-example losses are
    collected in float64 and reduced once at the end, so the reduction is
    independent of batching; for a fixed batch_size the report is bitwise
    reproducible.  (Exact invariance across batch sizes is out of reach in
    32-bit storage: BLAS blocks the forward GEMMs differently per shape.)
    """
    if isinstance(net, NormalizedNetwork):
        net = net.net
    n = len(dataset)
    losses = np.empty(n, dtype=np.float64)
    wrong = 0
    for start in range(0, n, batch_size):
        stop = min(start + batch_size, n)
        x = dataset.images[start:stop].astype(net.dtype, copy=False)
        labels = dataset.labels[start:stop]
        logits = forward(net, x, mode="eval")
        losses[start:stop] = crossentropy_per_example(logits, labels)
        wrong += int(np.count_nonzero(logits.argmax(axis=1) != labels))
    return EvalReport(dataset_id=dataset_id(dataset),
                      loss=float(np.mean(losses)), error=wrong / n,
                      n_examples=n)
