"""Generalization-gap reporting, the psi loss transform, norm equivalence.

The gap bound has the shape  |E(l) - E_S(l)| <= c1 * C_N + sqrt(ln(1/d)/2N)
with C_N an empirical complexity of the hypothesis class.  C_N and c1 are
not computable for deep nets, so the report treats the whole data-dependent
part as the offset fitted to the observed (train, test) points and only the
confidence term is evaluated in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from normlab.analysis.fits import LinearFit, linear_fit

# Formally the gap bound needs a bounded loss; cross-entropy is not.  Gaps
# are reported on the raw normalized loss and this caveat travels with them.
UNBOUNDED_LOSS_NOTE = ("gap bound assumes a bounded loss; gaps computed on "
                       "raw normalized cross-entropy")


def psi_transform(x):
    """Classification error implied by binary logistic loss x: 1 - sqrt(1-x^2).

    Evaluated as x^2 / (1 + sqrt(1 - x^2)) to avoid cancellation near 0.
    Accepts a scalar or an array with entries in [0, 1].
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("psi_transform domain is [0, 1]")
    out = arr * arr / (1.0 + np.sqrt(1.0 - arr * arr))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def confidence_term(delta, n_examples):
    """The sqrt(ln(1/delta) / 2N) confidence radius."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if n_examples < 1:
        raise ValueError("n_examples must be positive")
    return math.sqrt(math.log(1.0 / delta) / (2.0 * n_examples))


def normalized_loss_pairs(records):
    """(normalized train loss, normalized test loss) pairs.

    Accepts plain (train, test) pairs or record objects carrying
    norm_train_loss / norm_test_loss attributes.
    """
    pairs = []
    for rec in records:
        if hasattr(rec, "norm_train_loss"):
            pairs.append((float(rec.norm_train_loss),
                          float(rec.norm_test_loss)))
        else:
            train, test = rec
            pairs.append((float(train), float(test)))
    return pairs


@dataclass(frozen=True)
class BoundReport:
    """How tight the train-to-test gap is against the fitted offset."""

    gaps: np.ndarray
    offset: float
    fit: LinearFit
    c2_term: float
    delta: float
    n_examples: int
    threshold: float
    tight: bool
    note: str = field(default=UNBOUNDED_LOSS_NOTE)


def bound_report(records, delta=0.05, n_examples=50_000, threshold=0.15):
    """Per-point |test - train| gaps of normalized loss plus the fitted offset.

    The verdict is "tight" when the fitted intercept stays below the
    threshold, which defaults to roughly twice the offset observed at full
    scale so desk-scale runs have headroom.
    """
    pairs = normalized_loss_pairs(records)
    gaps = np.array([abs(test - train) for train, test in pairs],
                    dtype=np.float64)
    fit = linear_fit(pairs)
    c2 = confidence_term(delta, n_examples)
    return BoundReport(gaps=gaps, offset=fit.intercept, fit=fit, c2_term=c2,
                       delta=float(delta), n_examples=int(n_examples),
                       threshold=float(threshold),
                       tight=bool(abs(fit.intercept) < threshold))


@dataclass(frozen=True)
class NormEquivalenceReport:
    """Both sides of  ||x||_q <= ||x||_p <= n^(1/p - 1/q) ||x||_q."""

    p: float
    q: float
    dim: int
    norm_p: float
    norm_q: float
    lower_ratio: float
    upper_ratio: float


def norm_equivalence_check(x, p, q):
    """Verify the finite-dimensional Lp/Lq sandwich for p <= q.

    Returns the two ratios ||x||_p / ||x||_q  (at least 1) and
    ||x||_p / (n^(1/p-1/q) ||x||_q)  (at most 1).  Raises if either
    inequality fails beyond float rounding, which would indicate a broken
    norm implementation rather than bad data.
    """
    if p < 1 or q < 1:
        raise ValueError("norm orders must be >= 1")
    if p > q:
        raise ValueError(f"need p <= q, got p={p}, q={q}")
    vec = np.asarray(x, dtype=np.float64).ravel()
    if vec.size == 0:
        raise ValueError("vector is empty")
    norm_p = float(np.linalg.norm(vec, ord=p))
    norm_q = float(np.linalg.norm(vec, ord=q))
    if norm_q == 0.0:
        raise ValueError("zero vector; ratios are undefined")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    factor = vec.size ** (inv_p - inv_q)
    slack = 1e-12
    if norm_p < norm_q * (1.0 - slack):
        raise AssertionError(f"||x||_p={norm_p} < ||x||_q={norm_q}")
    if norm_p > factor * norm_q * (1.0 + slack):
        raise AssertionError(
            f"||x||_p={norm_p} > {factor} * ||x||_q={factor * norm_q}")
    return NormEquivalenceReport(p=float(p), q=float(q), dim=vec.size,
                                 norm_p=norm_p, norm_q=norm_q,
                                 lower_ratio=norm_p / norm_q,
                                 upper_ratio=norm_p / (factor * norm_q))
