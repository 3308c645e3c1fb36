"""Ordinary least squares with the fit statistics the experiments report."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinearFit:
    """Simple-regression summary: y ~ slope * x + intercept."""

    slope: float
    intercept: float
    r_squared: float
    adjusted_r_squared: float
    rmse: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("a linear fit needs at least 2 points")
        if self.rmse < 0:
            raise ValueError("RMSE cannot be negative")
        if self.r_squared > 1.0 + 1e-12:
            raise ValueError(f"R^2 {self.r_squared} exceeds 1")

    def predict(self, x):
        return self.slope * np.asarray(x, dtype=np.float64) + self.intercept


def linear_fit(points):
    """Least-squares line through (x, y) pairs, with R^2, adjusted R^2, RMSE.

    Adjusted R^2 uses one predictor: 1 - (1-R^2)(n-1)/(n-2).  With exactly
    two points that correction divides by zero, so the plain R^2 is
    reported instead.  RMSE is sqrt(SSE/n), not the sqrt(SSE/(n-2))
    regression standard error.
    """
    pts = np.asarray(list(points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, y) pairs")
    n = pts.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    x, y = pts[:, 0], pts[:, 1]
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise ValueError("x values are all identical; slope is undefined")
    sxy = float(np.sum((x - xm) * (y - ym)))
    slope = sxy / sxx
    intercept = ym - slope * xm
    residual = y - (slope * x + intercept)
    sse = float(np.sum(residual ** 2))
    sst = float(np.sum((y - ym) ** 2))
    # sst == 0 means y is constant; the horizontal line fits it exactly.
    r2 = 1.0 if sst == 0.0 else 1.0 - sse / sst
    if n > 2:
        adj = 1.0 - (1.0 - r2) * (n - 1) / (n - 2)
    else:
        adj = r2
    return LinearFit(slope=slope, intercept=intercept, r_squared=r2,
                     adjusted_r_squared=adj, rmse=float(np.sqrt(sse / n)),
                     count=n)
