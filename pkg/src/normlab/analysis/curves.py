"""Relation between normalized cross-entropy and classification error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr


@dataclass(frozen=True)
class ErrorLossCurve:
    """(normalized loss, test error) points ordered by loss."""

    points: np.ndarray
    spearman: float
    loss_source: str


def error_vs_loss_curve(records, loss_source="test"):
    """Pair each record's normalized loss with its test classification error.

    loss_source picks the normalized test or train loss for the x axis;
    the y axis is always test error.  The Spearman rank correlation is the
    monotonicity score (the relation is only approximately monotone, so a
    rank statistic is the right summary).  Accepts record objects or plain
    (loss, error) pairs.
    """
    if loss_source not in ("test", "train"):
        raise ValueError("loss_source must be 'test' or 'train'")
    attr = "norm_test_loss" if loss_source == "test" else "norm_train_loss"
    pairs = []
    for rec in records:
        if hasattr(rec, attr):
            pairs.append((float(getattr(rec, attr)), float(rec.test_err)))
        else:
            loss, err = rec
            pairs.append((float(loss), float(err)))
    if len(pairs) < 2:
        raise ValueError("need at least 2 records for a curve")
    pts = np.asarray(pairs, dtype=np.float64)
    pts = pts[np.argsort(pts[:, 0], kind="stable")]
    rho = float(spearmanr(pts[:, 0], pts[:, 1]).statistic)
    return ErrorLossCurve(points=pts, spearman=rho, loss_source=loss_source)
