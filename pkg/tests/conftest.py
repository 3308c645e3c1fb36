"""Shared fixtures: small synthetic datasets and randomly initialized nets."""

import numpy as np
import pytest

from normlab.data.dataset import Dataset, Provenance
from normlab.data.standardize import apply_standardizer, fit_standardizer
from normlab.data.synth import make_digit_dataset
from normlab.engine.network import build_architecture
from normlab.engine.optim import init_gaussian


def digit_dataset(n, seed, noise=0.05, standardizer=None):
    images, labels = make_digit_dataset(n, seed, noise=noise)
    ds = Dataset(images, labels, 10,
                 Provenance(source=f"synth-digits(n={n}, seed={seed})",
                            source_digest=f"synth:{n}:{seed}:{noise}"))
    if standardizer is not None:
        ds = apply_standardizer(standardizer, ds)
    return ds


def random_net(name="mnist3x34", std=0.05, seed=0, class_count=10):
    net = build_architecture(name, class_count)
    init_gaussian(net, std, seed=seed)
    return net


@pytest.fixture(scope="session")
def digit_pair():
    """Standardized 300-train / 150-test digit datasets."""
    train = digit_dataset(300, seed=101)
    standardizer = fit_standardizer(train)
    train = apply_standardizer(standardizer, train)
    test = digit_dataset(150, seed=102, standardizer=standardizer)
    return train, test


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0)
