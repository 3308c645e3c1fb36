"""Experiment configuration: one INI file per experiment.

Sections: [experiment] for protocol and sweep settings, [optimizer] for SGD
hyperparameters, [dataset] for data files and preprocessing.  Every key has
a default; keys the file leaves out are tracked so run summaries can echo
which values were defaulted rather than chosen.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from normlab.data.corrupt import subset as take_subset
from normlab.data.loaders import load_cifar_binary, load_idx
from normlab.data.standardize import apply_standardizer, fit_standardizer
from normlab.engine.network import ARCHITECTURES, CLASS_COUNTS
from normlab.normalize.layerwise import norm_kind_from_name

PROTOCOLS = ("pretrain-sweep", "init-std-sweep", "random-labels")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs, resolved to concrete values."""

    # [experiment]
    protocol: str = "init-std-sweep"
    architecture: str = "mnist3x34"
    class_count: int = 10
    sweep: tuple = (0.05,)
    pretrain_epochs: int = 30
    train_epochs: int = 80
    rl_epochs: int = 300
    reference_loss: float = 0.006
    selection_band: float = 2.0
    init_std: float = 0.05
    rl_std: float = 0.05
    random_label_point: bool = False
    norm: str = "fro"
    master_seed: int = 0
    output_dir: str = "runs/experiment"
    # [optimizer]
    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 64
    eval_batch_size: int = 256
    # [dataset]
    data_format: str = "idx"
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    subset_size: int = 0
    test_subset_size: int = 0
    subset_seed: int = 0
    standardize: bool = True
    # keys the config file did not set (metadata, echoed into summaries)
    defaulted: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(
                f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.class_count not in CLASS_COUNTS:
            raise ValueError(f"class_count must be one of {CLASS_COUNTS}")
        if len(self.sweep) == 0:
            raise ValueError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
            raise ValueError("sweep values must be strictly increasing")
        for name in ("pretrain_epochs", "train_epochs", "rl_epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.reference_loss <= 0:
            raise ValueError("reference_loss must be > 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1 or self.eval_batch_size < 1:
            raise ValueError("batch sizes must be >= 1")
        norm_kind_from_name(self.norm)
        if self.data_format not in ("idx", "cifar"):
            raise ValueError("data_format must be 'idx' or 'cifar'")

    def to_dict(self):
        """All resolved values plus the list of defaulted keys."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


_SECTIONS = {
    "experiment": ("protocol", "architecture", "class_count", "sweep",
                   "pretrain_epochs", "train_epochs", "rl_epochs",
                   "reference_loss", "selection_band", "init_std", "rl_std",
                   "random_label_point", "norm", "master_seed", "output_dir"),
    "optimizer": ("learning_rate", "momentum", "batch_size",
                  "eval_batch_size"),
    "dataset": ("data_format", "train_images", "train_labels", "test_images",
                "test_labels", "subset_size", "test_subset_size",
                "subset_seed", "standardize"),
}
_INTS = {"class_count", "pretrain_epochs", "train_epochs", "rl_epochs",
         "master_seed", "batch_size", "eval_batch_size", "subset_size",
         "test_subset_size", "subset_seed"}
_FLOATS = {"reference_loss", "selection_band", "init_std", "rl_std",
           "learning_rate", "momentum"}
_BOOLS = {"random_label_point", "standardize"}


def parse_config(path):
    """Read an ExperimentConfig from an INI file, tracking defaulted keys."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                       interpolation=None)
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(f"{path}: unknown config section [{section}]")
        for key in parser[section]:
            if key not in _SECTIONS[section]:
                raise ValueError(f"{path}: unknown key {key!r} in [{section}]")

    values = {}
    defaulted = []
    for section, keys in _SECTIONS.items():
        for key in keys:
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                if key == "sweep":
                    values[key] = tuple(float(v) for v in raw.split(","))
                elif key in _INTS:
                    values[key] = int(raw)
                elif key in _FLOATS:
                    values[key] = float(raw)
                elif key in _BOOLS:
                    values[key] = parser.getboolean(section, key)
                else:
                    values[key] = raw
            else:
                defaulted.append(f"{section}.{key}")
    return ExperimentConfig(defaulted=tuple(defaulted), **values)


def config_from_dict(d):
    """Rebuild an ExperimentConfig from :meth:`ExperimentConfig.to_dict`."""
    values = dict(d)
    values["sweep"] = tuple(values.get("sweep", ()))
    values["defaulted"] = tuple(values.get("defaulted", ()))
    return ExperimentConfig(**values)


def datasets_from_config(cfg):
    """Load, subset, and standardize the train/test datasets of a config.

    The standardizer is always fitted on the (possibly subset) training
    images and applied to both splits, so test preprocessing never sees
    test statistics.
    """
    if cfg.data_format == "idx":
        if not cfg.train_images or not cfg.test_images:
            raise ValueError("idx datasets need train_images and test_images")
        train = load_idx(cfg.train_images, cfg.train_labels, cfg.class_count)
        test = load_idx(cfg.test_images, cfg.test_labels, cfg.class_count)
    else:
        variant = "cifar100" if cfg.class_count == 100 else "cifar10"
        train = load_cifar_binary(cfg.train_images.split(","), variant)
        test = load_cifar_binary(cfg.test_images.split(","), variant)
    if cfg.subset_size:
        train = take_subset(train, cfg.subset_size, cfg.subset_seed)
    if cfg.test_subset_size:
        test = take_subset(test, cfg.test_subset_size, cfg.subset_seed + 1)
    if cfg.standardize:
        std = fit_standardizer(train)
        train = apply_standardizer(std, train)
        test = apply_standardizer(std, test)
    return train, test
