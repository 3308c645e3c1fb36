"""Per-channel standardization fitted on training data only."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

STD_FLOOR = 1e-8


@dataclass(frozen=True)
class Standardizer:
    """Per-channel mean/std of a training set; std is floored at 1e-8."""

    mean: np.ndarray
    std: np.ndarray
    fitted_on: str = ""

    @property
    def ident(self):
        return f"standardizer({self.fitted_on})"


def fit_standardizer(train):
    """Channel statistics of the training images (never fit on test data)."""
    mean = train.images.mean(axis=(0, 2, 3), dtype=np.float64)
    std = train.images.std(axis=(0, 2, 3), dtype=np.float64)
    std = np.maximum(std, STD_FLOOR)
    return Standardizer(mean=mean, std=std,
                        fitted_on=train.provenance.source_digest)


def apply_standardizer(standardizer, ds):
    """(x - mean) / std per channel; returns a new Dataset."""
    m = standardizer.mean[None, :, None, None]
    s = standardizer.std[None, :, None, None]
    images = ((ds.images - m) / s).astype(np.float32)
    prov = replace(ds.provenance, standardizer_id=standardizer.ident)
    return type(ds)(images, ds.labels, ds.class_count, prov)


def invert_standardizer(standardizer, ds):
    """Undo :func:`apply_standardizer` (up to float32 rounding)."""
    m = standardizer.mean[None, :, None, None]
    s = standardizer.std[None, :, None, None]
    images = (ds.images * s + m).astype(np.float32)
    prov = replace(ds.provenance, standardizer_id="")
    return type(ds)(images, ds.labels, ds.class_count, prov)
