"""Monte Carlo empirical Rademacher complexity of a norm-bounded linear class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RademacherEstimate:
    """Estimate with its sampling error and the analytic ceiling X*W/sqrt(N)."""

    estimate: float
    std_error: float
    trials: int
    x_bound: float
    w_bound: float
    ceiling: float

    def __post_init__(self):
        if self.estimate > self.ceiling + 3.0 * self.std_error:
            raise ValueError(
                f"estimate {self.estimate} exceeds analytic ceiling "
                f"{self.ceiling} by more than 3 standard errors")


def rademacher_linear(data, w_bound=1.0, trials=1000, seed=0):
    """Empirical Rademacher complexity of {x -> <w, x> : ||w||_2 <= W}.

    For each sign draw the supremum is closed-form: sup_w (1/N) sum_i
    s_i <w, x_i> = (W/N) ||sum_i s_i x_i||_2, attained by w aligned with
    the signed sum.  Monte Carlo variance therefore comes only from the
    sign sampling.  X is the largest row norm, giving the Jensen ceiling
    X*W/sqrt(N).
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("data must be a nonempty (N, d) matrix")
    if w_bound <= 0:
        raise ValueError("w_bound must be positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = x.shape[0]
    rng = np.random.default_rng(seed)
    values = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        signs = rng.integers(0, 2, size=n) * 2 - 1
        values[t] = w_bound / n * np.linalg.norm(signs @ x)
    x_bound = float(np.linalg.norm(x, axis=1).max())
    # A lone draw can sit above the Jensen ceiling (only the mean is bounded
    # by it), and one sample gives no error estimate, hence the inf.
    std_error = (float(values.std(ddof=1) / np.sqrt(trials))
                 if trials > 1 else float("inf"))
    return RademacherEstimate(estimate=float(values.mean()),
                              std_error=std_error, trials=trials,
                              x_bound=x_bound, w_bound=float(w_bound),
                              ceiling=x_bound * w_bound / np.sqrt(n))
