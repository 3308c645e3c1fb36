"""Binary dataset loaders: IDX (MNIST container) and CIFAR-10/100 records.

Both loaders validate file structure strictly and fail loudly; a malformed
file is never silently truncated.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from normlab.data.dataset import Dataset, Provenance
from normlab.errors import FormatError

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


def file_digest(path):
    """Short sha256 of a file, used as a provenance id."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def _read_exact(f, n, path, what):
    data = f.read(n)
    if len(data) != n:
        raise FormatError(f"{path}: truncated while reading {what} "
                          f"({len(data)} of {n} bytes)")
    return data


def load_idx(images_path, labels_path, class_count=10):
    """Load an IDX image/label file pair into a Dataset.

    Pixels map to [0, 1] floats; images come out as (N, 1, H, W).
    """
    images_path, labels_path = Path(images_path), Path(labels_path)

    with open(images_path, "rb") as f:
        magic, n, rows, cols = struct.unpack(">iiii", _read_exact(f, 16, images_path,
                                                                  "image header"))
        if magic != IDX_IMAGE_MAGIC:
            raise FormatError(f"{images_path}: bad image magic "
                              f"0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}")
        raw = _read_exact(f, n * rows * cols, images_path, "pixel data")
        if f.read(1):
            raise FormatError(f"{images_path}: trailing bytes after pixel data")

    with open(labels_path, "rb") as f:
        magic, n_labels = struct.unpack(">ii", _read_exact(f, 8, labels_path,
                                                           "label header"))
        if magic != IDX_LABEL_MAGIC:
            raise FormatError(f"{labels_path}: bad label magic "
                              f"0x{magic:08x}, expected 0x{IDX_LABEL_MAGIC:08x}")
        raw_labels = _read_exact(f, n_labels, labels_path, "label data")
        if f.read(1):
            raise FormatError(f"{labels_path}: trailing bytes after label data")

    if n != n_labels:
        raise FormatError(f"{images_path} holds {n} images but "
                          f"{labels_path} holds {n_labels} labels")

    images = np.frombuffer(raw, dtype=np.uint8).reshape(n, 1, rows, cols)
    images = images.astype(np.float32) / 255.0
    labels = np.frombuffer(raw_labels, dtype=np.uint8).astype(np.int64)
    if labels.max(initial=0) >= class_count:
        raise FormatError(f"{labels_path}: label {labels.max()} out of range "
                          f"for class_count {class_count}")
    prov = Provenance(source=f"idx:{images_path.name}",
                      source_digest=file_digest(images_path))
    return Dataset(images, labels, class_count, prov)


def load_cifar_binary(paths, variant="cifar10"):
    """Load CIFAR-10/100 binary batch files into a Dataset.

    cifar10 records are 1 label byte + 3072 pixel bytes; cifar100 records
    carry a coarse then a fine label byte, and the fine label is used.
    Pixel bytes are channel-major (R plane, G plane, B plane).
    """
    if variant == "cifar10":
        label_bytes, class_count = 1, 10
    elif variant == "cifar100":
        label_bytes, class_count = 2, 100
    else:
        raise ValueError(f"variant must be cifar10 or cifar100, got {variant!r}")
    record = label_bytes + 3072

    if isinstance(paths, (str, Path)):
        paths = [paths]
    chunks, label_chunks, digests = [], [], []
    for path in paths:
        path = Path(path)
        raw = path.read_bytes()
        if len(raw) == 0 or len(raw) % record != 0:
            raise FormatError(f"{path}: size {len(raw)} is not a multiple of "
                              f"the {record}-byte {variant} record")
        data = np.frombuffer(raw, dtype=np.uint8).reshape(-1, record)
        label_chunks.append(data[:, label_bytes - 1].astype(np.int64))
        chunks.append(data[:, label_bytes:])
        digests.append(file_digest(path))

    pixels = np.concatenate(chunks)
    labels = np.concatenate(label_chunks)
    images = pixels.reshape(-1, 3, 32, 32).astype(np.float32) / 255.0
    if labels.max() >= class_count:
        raise FormatError(f"label {labels.max()} out of range for {variant}")
    prov = Provenance(source=f"{variant}:{len(paths)} file(s)",
                      source_digest="+".join(digests)[:64])
    return Dataset(images, labels, class_count, prov)
