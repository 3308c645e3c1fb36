"""Epoch-granularity minibatch SGD with per-epoch snapshots."""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import numpy as np

from normlab.analysis.evaluate import evaluate
from normlab.engine.network import backward_from_caches
from normlab.engine.optim import sgd_step


@dataclass(frozen=True)
class Snapshot:
    """One epoch's weights with its full-training-set loss and error."""

    epoch: int
    checkpoint: object  # Network copy at this epoch
    train_loss: float
    train_err: float
    stamp: float
    checkpoint_path: str = ""

    def __post_init__(self):
        if not np.isfinite(self.train_loss):
            raise ValueError(f"epoch {self.epoch}: non-finite train loss")


def train(net, dataset, opt, epochs, eval_batch_size=256,
          snapshot_each_epoch=True, log_every=0):
    """Train ``net`` in place for ``epochs`` epochs; return its snapshots.

    Each epoch visits the whole set once in a freshly shuffled order drawn
    from the optimizer's seeded generator, then measures loss and error
    over the full training set in eval mode.  With snapshot_each_epoch
    False only the final epoch is snapshotted (cheaper, for pretraining
    phases whose intermediate states are never selected).  Batch-norm
    running statistics update after each minibatch.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    rng = np.random.default_rng(opt.seed)
    n = len(dataset)
    images, labels = dataset.images, dataset.labels
    snapshots = []
    for epoch in range(1, epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, opt.batch_size):
            idx = order[start:start + opt.batch_size]
            x = images[idx].astype(net.dtype, copy=False)
            y = labels[idx]
            logits, caches = net.forward(x, mode="train", with_caches=True)
            grads = backward_from_caches(net, caches, logits, y)
            sgd_step(net, grads, opt)
            for layer, cache in zip(net.layers, caches):
                if layer.kind == "batchnorm":
                    _, _, _, mean, var = cache
                    layer.update_running(mean, var)
        opt.epoch += 1
        if snapshot_each_epoch or epoch == epochs:
            report = evaluate(net, dataset, batch_size=eval_batch_size)
            snapshots.append(Snapshot(epoch=epoch, checkpoint=net.copy(),
                                      train_loss=report.loss,
                                      train_err=report.error,
                                      stamp=time.time()))
            if log_every and epoch % log_every == 0:
                print(f"    epoch {epoch:4d}  loss {report.loss:.6f}  "
                      f"err {report.error:.4f}", file=sys.stderr)
    return snapshots


def select_snapshot(snapshots, reference_loss):
    """The snapshot whose train loss is closest to the reference.

    Exact distance ties resolve to the earliest epoch (snapshots arrive in
    epoch order, and min keeps the first of equal keys).
    """
    if not snapshots:
        raise ValueError("no snapshots to select from")
    return min(snapshots, key=lambda s: abs(s.train_loss - reference_loss))
