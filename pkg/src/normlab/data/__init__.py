from normlab.data.corrupt import (
    CorruptionPlan,
    corrupt_labels,
    randomize_all_labels,
    round_half_up,
    subset,
)
from normlab.data.dataset import Dataset, Provenance
from normlab.data.loaders import file_digest, load_cifar_binary, load_idx
from normlab.data.standardize import (
    Standardizer,
    apply_standardizer,
    fit_standardizer,
    invert_standardizer,
)

__all__ = [
    "CorruptionPlan",
    "Dataset",
    "Provenance",
    "Standardizer",
    "apply_standardizer",
    "corrupt_labels",
    "file_digest",
    "fit_standardizer",
    "invert_standardizer",
    "load_cifar_binary",
    "load_idx",
    "randomize_all_labels",
    "round_half_up",
    "subset",
]
