"""IDX/CIFAR loaders against hand-built fixture bytes, and Dataset rules."""

import struct

import numpy as np
import pytest

from normlab.data.dataset import Dataset, Provenance
from normlab.data.loaders import file_digest, load_cifar_binary, load_idx
from normlab.errors import FormatError


def write_idx_pair(tmp_path, images, labels, image_magic=0x803,
                   label_magic=0x801, label_count=None, trailing=b""):
    n, h, w = images.shape
    ip = tmp_path / "imgs"
    lp = tmp_path / "lbls"
    ip.write_bytes(struct.pack(">iiii", image_magic, n, h, w) +
                   images.tobytes() + trailing)
    lp.write_bytes(struct.pack(">ii", label_magic,
                               n if label_count is None else label_count) +
                   labels.tobytes())
    return ip, lp


@pytest.fixture
def idx_fixture(tmp_path):
    rng = np.random.default_rng(0)
    images = rng.integers(0, 256, size=(5, 4, 3), dtype=np.uint8)
    labels = np.array([0, 3, 9, 1, 1], dtype=np.uint8)
    return write_idx_pair(tmp_path, images, labels), images, labels


def test_idx_round_trip(idx_fixture):
    (ip, lp), images, labels = idx_fixture
    ds = load_idx(ip, lp)
    assert ds.images.shape == (5, 1, 4, 3)
    np.testing.assert_allclose(ds.images[:, 0] * 255.0, images, atol=1e-4)
    assert np.array_equal(ds.labels, labels)
    assert ds.provenance.source_digest == file_digest(ip)
    assert ds.provenance.source == "idx:imgs"


def test_idx_bad_image_magic(tmp_path):
    images = np.zeros((2, 2, 2), dtype=np.uint8)
    labels = np.zeros(2, dtype=np.uint8)
    ip, lp = write_idx_pair(tmp_path, images, labels, image_magic=0x802)
    with pytest.raises(FormatError, match="bad image magic"):
        load_idx(ip, lp)


def test_idx_bad_label_magic(tmp_path):
    images = np.zeros((2, 2, 2), dtype=np.uint8)
    labels = np.zeros(2, dtype=np.uint8)
    ip, lp = write_idx_pair(tmp_path, images, labels, label_magic=0x803)
    with pytest.raises(FormatError, match="bad label magic"):
        load_idx(ip, lp)


def test_idx_truncated_pixels(tmp_path):
    ip = tmp_path / "imgs"
    lp = tmp_path / "lbls"
    ip.write_bytes(struct.pack(">iiii", 0x803, 3, 4, 4) + b"\0" * 10)
    lp.write_bytes(struct.pack(">ii", 0x801, 3) + b"\0" * 3)
    with pytest.raises(FormatError, match="truncated"):
        load_idx(ip, lp)


def test_idx_count_mismatch(tmp_path):
    images = np.zeros((3, 2, 2), dtype=np.uint8)
    labels = np.zeros(2, dtype=np.uint8)
    ip, lp = write_idx_pair(tmp_path, images, labels, label_count=2)
    with pytest.raises(FormatError, match="3 images but .* 2 labels"):
        load_idx(ip, lp)


def test_idx_trailing_bytes(tmp_path):
    images = np.zeros((2, 2, 2), dtype=np.uint8)
    labels = np.zeros(2, dtype=np.uint8)
    ip, lp = write_idx_pair(tmp_path, images, labels, trailing=b"x")
    with pytest.raises(FormatError, match="trailing"):
        load_idx(ip, lp)


def test_idx_label_out_of_class_range(tmp_path):
    images = np.zeros((2, 2, 2), dtype=np.uint8)
    labels = np.array([0, 4], dtype=np.uint8)
    ip, lp = write_idx_pair(tmp_path, images, labels)
    with pytest.raises(FormatError, match="out of range"):
        load_idx(ip, lp, class_count=4)


def make_cifar_file(tmp_path, name, labels, variant="cifar10", seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for lab in labels:
        head = bytes([0, lab]) if variant == "cifar100" else bytes([lab])
        rows.append(head + rng.integers(0, 256, 3072,
                                        dtype=np.uint8).tobytes())
    path = tmp_path / name
    path.write_bytes(b"".join(rows))
    return path


def test_cifar10_round_trip(tmp_path):
    p1 = make_cifar_file(tmp_path, "b1.bin", [0, 5, 9], seed=1)
    p2 = make_cifar_file(tmp_path, "b2.bin", [3], seed=2)
    ds = load_cifar_binary([p1, p2])
    assert ds.images.shape == (4, 3, 32, 32)
    assert np.array_equal(ds.labels, [0, 5, 9, 3])
    assert ds.class_count == 10
    # first pixel plane of the first file decodes channel-major
    raw = p1.read_bytes()
    np.testing.assert_allclose(ds.images[0, 0].ravel() * 255.0,
                               np.frombuffer(raw[1:1025], dtype=np.uint8),
                               atol=1e-4)


def test_cifar100_uses_fine_label(tmp_path):
    p = make_cifar_file(tmp_path, "c100.bin", [42, 99], variant="cifar100")
    ds = load_cifar_binary(p, variant="cifar100")
    assert np.array_equal(ds.labels, [42, 99])
    assert ds.class_count == 100


def test_cifar_bad_record_size(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"\0" * 100)
    with pytest.raises(FormatError, match="not a multiple"):
        load_cifar_binary(p)
    with pytest.raises(ValueError, match="variant"):
        load_cifar_binary(p, variant="cifar20")


def test_dataset_arrays_are_read_only():
    images = np.zeros((2, 1, 2, 2), dtype=np.float32)
    labels = np.array([0, 1])
    ds = Dataset(images, labels, 10)
    with pytest.raises(ValueError):
        ds.images[0, 0, 0, 0] = 1.0
    with pytest.raises(ValueError):
        ds.labels[0] = 3


def test_dataset_validation():
    ok = np.zeros((2, 1, 2, 2), dtype=np.float32)
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 2, 2), dtype=np.float32), np.array([0, 1]), 10)
    with pytest.raises(ValueError):
        Dataset(ok, np.array([0]), 10)
    with pytest.raises(ValueError):
        Dataset(ok, np.array([0, 10]), 10)
    with pytest.raises(ValueError):
        Dataset(np.zeros((0, 1, 2, 2), dtype=np.float32),
                np.zeros(0, dtype=np.int64), 10)


def test_take_preserves_order_and_notes():
    images = np.arange(8, dtype=np.float32).reshape(8, 1, 1, 1)
    ds = Dataset(images, np.arange(8) % 3, 3,
                 Provenance(source="x", source_digest="d"))
    sub = ds.take(np.array([5, 1]), notes="picked")
    assert np.array_equal(sub.images.ravel(), [5.0, 1.0])
    assert np.array_equal(sub.labels, [2, 1])
    assert sub.provenance.source_digest == "d"
    assert "picked" in sub.provenance.notes


def test_file_digest_is_stable_prefix(tmp_path):
    p = tmp_path / "f"
    p.write_bytes(b"hello")
    d = file_digest(p)
    assert len(d) == 16 and d == file_digest(p)
    p.write_bytes(b"hello!")
    assert file_digest(p) != d
