"""Label corruption, full relabeling, and subsetting.

Corruption swaps labels among a randomly selected set of examples using one
uniformly drawn cycle, so the label multiset is preserved exactly and every
selected slot receives the label of a different selected example (whenever
more than one example is selected).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CorruptionPlan:
    """Record of which indices were selected and how their labels moved."""

    fraction: float
    seed: int
    selected: np.ndarray  # indices whose labels were permuted
    permuted_to: np.ndarray  # permuted_to[i] = index whose old label selected[i] got


def round_half_up(x):
    """round(0.5) -> 1, unlike banker's rounding."""
    return int(np.floor(x + 0.5))


def corrupt_labels(ds, fraction, seed):
    """Swap the labels of a round(fraction*N) subset along one random cycle.

    Returns the corrupted dataset and the plan that produced it.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    n = len(ds)
    k = round_half_up(fraction * n)
    rng = np.random.default_rng(seed)
    selected = np.sort(rng.choice(n, size=k, replace=False))
    # A uniformly shuffled ordering read as a cycle: position i takes the
    # label of position i+1 (wrapping), which is uniform over all k-cycles.
    order = rng.permutation(selected)
    source = np.roll(order, -1)
    labels = ds.labels.copy()
    labels[order] = ds.labels[source]
    sort_idx = np.argsort(order)  # realign the plan with sorted indices
    plan = CorruptionPlan(fraction=float(fraction), seed=int(seed),
                          selected=order[sort_idx],
                          permuted_to=source[sort_idx])
    out = ds.with_labels(labels, corruption_fraction=float(fraction),
                         corruption_seed=int(seed))
    return out, plan


def randomize_all_labels(ds, seed):
    """Redraw every label i.i.d. uniform over the classes."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, ds.class_count, size=len(ds), dtype=np.int64)
    return ds.with_labels(labels, corruption_fraction=1.0,
                          corruption_seed=int(seed),
                          notes="labels redrawn i.i.d. uniform")


def subset(ds, n, seed):
    """Sample n examples without replacement."""
    if not 1 <= n <= len(ds):
        raise ValueError(f"subset size must lie in [1, {len(ds)}], got {n}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(ds), size=n, replace=False)
    return ds.take(idx, notes=f"subset n={n} seed={seed}")
