"""Gradient descent from zero on a linear least-squares problem.

The demonstration behind normalizing at all: GD started at the origin never
leaves the row space of the data, so on an underdetermined system it lands
on the minimum-L2-norm interpolant, which for separable labels is also the
larger-margin one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MinNormReport:
    """GD limit on (1/2N)||Xw - y||^2 with its norm and margin."""

    weights: np.ndarray
    weight_norm: float
    margin: float
    final_loss: float
    iterations: int
    row_space_leak: float


def min_norm_gd_demo(x_matrix, y, lr=None, iterations=10_000):
    """Run full-batch GD from w = 0 and report the limit's norm and margin.

    lr defaults to 1/largest eigenvalue of X^T X / N, half the divergence
    threshold.  Divergence (loss increasing across a 20-step window) is an
    error: it means the caller's lr violated the spectral bound.  The
    orthogonal-to-row-space component of the iterate is tracked; it stays
    at numerical zero, which is the mechanism forcing the min-norm limit.
    """
    x = np.asarray(x_matrix, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64).ravel()
    if x.ndim != 2:
        raise ValueError("X must be a matrix")
    n, d = x.shape
    if yv.shape != (n,):
        raise ValueError(f"y has shape {yv.shape}, expected ({n},)")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")

    hessian_scale = float(np.linalg.eigvalsh(x.T @ x / n).max())
    if lr is None:
        lr = 1.0 / hessian_scale
    if lr <= 0:
        raise ValueError("lr must be positive")

    # Orthonormal row-space basis for the leak check.
    _, svals, vt = np.linalg.svd(x, full_matrices=False)
    rank = int(np.sum(svals > svals[0] * max(n, d) * np.finfo(np.float64).eps)) \
        if svals.size else 0
    basis = vt[:rank]

    w = np.zeros(d, dtype=np.float64)
    window = 20
    losses = []
    leak = 0.0
    # Rises below this are rounding jitter around an interpolating limit,
    # not divergence (the loss lands at ~eps^2 relative when y is hit).
    noise_floor = 0.5 * float(yv @ yv) / n * 1e-20
    for step in range(iterations):
        residual = x @ w - yv
        loss = 0.5 * float(residual @ residual) / n
        losses.append(loss)
        if (step >= window and loss > noise_floor
                and loss > losses[step - window] * (1.0 + 1e-9)):
            raise ValueError(
                f"diverged at iteration {step}: loss rose from "
                f"{losses[step - window]:.3e} to {loss:.3e}; "
                f"lr must stay below {2.0 / hessian_scale:.3e}")
        w -= lr / n * (x.T @ residual)
        leak = max(leak, float(np.linalg.norm(w - basis.T @ (basis @ w))))

    residual = x @ w - yv
    final_loss = 0.5 * float(residual @ residual) / n
    norm = float(np.linalg.norm(w))
    scores = yv * (x @ w)
    margin = float(scores.min() / norm) if norm > 0 else 0.0
    return MinNormReport(weights=w, weight_norm=norm, margin=margin,
                         final_loss=final_loss, iterations=iterations,
                         row_space_leak=leak)
