"""Dataset container with provenance."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from and what was done to its labels."""

    source: str = "unknown"
    source_digest: str = ""
    corruption_fraction: float = 0.0
    corruption_seed: int | None = None
    standardizer_id: str = ""
    notes: str = ""


@dataclass(frozen=True)
class Dataset:
    """Images (N, C, H, W) float32 plus integer labels; arrays are read-only."""

    images: np.ndarray
    labels: np.ndarray
    class_count: int
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        if self.images.ndim != 4:
            raise ValueError("images must be (N, C, H, W)")
        if len(self.labels) != len(self.images):
            raise ValueError(
                f"{len(self.images)} images but {len(self.labels)} labels")
        if len(self.images) == 0:
            raise ValueError("dataset must contain at least one example")
        if self.labels.size and (self.labels.min() < 0
                                 or self.labels.max() >= self.class_count):
            raise ValueError(f"labels out of range [0, {self.class_count})")
        self.images.flags.writeable = False
        self.labels.flags.writeable = False

    def __len__(self):
        return len(self.images)

    @property
    def image_shape(self):
        return self.images.shape[1:]

    def with_labels(self, labels, **provenance_updates):
        """Same images, new labels; provenance fields updated as given."""
        prov = replace(self.provenance, **provenance_updates)
        return Dataset(self.images, np.ascontiguousarray(labels),
                       self.class_count, prov)

    def take(self, indices, **provenance_updates):
        """Row subset (copy) in the order given."""
        prov = replace(self.provenance, **provenance_updates)
        return Dataset(np.ascontiguousarray(self.images[indices]),
                       np.ascontiguousarray(self.labels[indices]),
                       self.class_count, prov)
