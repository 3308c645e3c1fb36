"""Synthetic seven-segment digits and their IDX serialization."""

import numpy as np
import pytest

from normlab.data.loaders import load_idx
from normlab.data.synth import (
    make_digit_dataset,
    render_digit,
    write_digit_idx_pair,
)


def test_rendered_digits_are_proper_images():
    rng = np.random.default_rng(0)
    for d in range(10):
        img = render_digit(d, rng)
        assert img.shape == (28, 28)
        assert img.min() >= 0.0 and img.max() <= 1.0
        assert img.max() > 0.5  # strokes actually drawn


def test_digit_classes_are_visually_distinct():
    rng = np.random.default_rng(1)
    protos = [render_digit(d, rng, noise=0.0) for d in range(10)]
    for a in range(10):
        for b in range(a + 1, 10):
            assert float(np.abs(protos[a] - protos[b]).mean()) > 0.01


def test_dataset_shapes_determinism_and_coverage():
    images, labels = make_digit_dataset(500, seed=3)
    assert images.shape == (500, 1, 28, 28) and images.dtype == np.float32
    assert labels.shape == (500,) and labels.dtype == np.int64
    assert set(labels.tolist()) == set(range(10))
    again, labels2 = make_digit_dataset(500, seed=3)
    assert np.array_equal(images, again) and np.array_equal(labels, labels2)
    other, _ = make_digit_dataset(500, seed=4)
    assert not np.array_equal(images, other)


def test_noise_perturbs_instances_of_one_class():
    images, labels = make_digit_dataset(300, seed=5, noise=0.1)
    cls = images[labels == labels[0]]
    assert len(cls) > 2
    assert not np.array_equal(cls[0], cls[1])


def test_idx_pair_round_trips_through_loader(tmp_path):
    ip, lp = write_digit_idx_pair(64, seed=6, out_dir=tmp_path, prefix="t")
    ds = load_idx(ip, lp)
    assert len(ds) == 64
    images, labels = make_digit_dataset(64, seed=6)
    assert np.array_equal(ds.labels, labels)
    # uint8 quantization is the only loss
    np.testing.assert_allclose(ds.images, np.round(images * 255) / 255,
                               atol=1 / 255)


def test_render_rejects_bad_digit():
    with pytest.raises(ValueError):
        render_digit(10, np.random.default_rng(0))
