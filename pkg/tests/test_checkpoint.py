"""Checkpoint format: bit-exact round trips and corruption detection."""

import struct

import numpy as np
import pytest

from normlab.errors import FormatError
from normlab.normalize.layerwise import LINF, normalize_layerwise
from normlab.protocols.checkpoint import (
    MAGIC,
    load_checkpoint,
    normalized_from_checkpoint,
    save_checkpoint,
)

from conftest import random_net


def _assert_nets_equal(a, b):
    assert [l.spec for l in a.layers] == [l.spec for l in b.layers]
    for la, lb in zip(a.layers, b.layers):
        for name in la.params():
            assert np.array_equal(la.params()[name], lb.params()[name]), name
        for name in la.state():
            assert np.array_equal(la.state()[name], lb.state()[name]), name


@pytest.mark.parametrize("name", ["mnist3x34", "cifar3x24", "conv5"])
def test_round_trip_is_bit_exact(name, tmp_path):
    net = random_net(name, std=0.07, seed=1)
    if name == "conv5":  # move the BN state off its initial values
        rng = np.random.default_rng(2)
        for layer in net.layers:
            if layer.kind == "batchnorm":
                layer.running_mean[...] = rng.normal(size=layer.running_mean.shape)
                layer.running_var[...] = rng.uniform(0.5, 2.0,
                                                     layer.running_var.shape)
    path = tmp_path / "net.ckpt"
    save_checkpoint(net, {"note": "fixture", "epoch": 3}, path)
    loaded, meta = load_checkpoint(path)
    _assert_nets_equal(net, loaded)
    assert loaded.input_shape == net.input_shape
    assert loaded.name == net.name
    assert meta["note"] == "fixture" and meta["epoch"] == "3"


def test_batchnorm_eps_momentum_survive(tmp_path):
    net = random_net("conv5", seed=3)
    for layer in net.layers:
        if layer.kind == "batchnorm":
            layer.eps = 2.5e-4
            layer.momentum = 0.35
    path = tmp_path / "bn.ckpt"
    save_checkpoint(net, {}, path)
    loaded, _ = load_checkpoint(path)
    for layer in loaded.layers:
        if layer.kind == "batchnorm":
            assert layer.eps == 2.5e-4
            assert layer.momentum == 0.35


def test_normalized_checkpoint_round_trip(tmp_path):
    net = random_net("mnist3x34", std=0.05, seed=4)
    normalized = normalize_layerwise(net, LINF)
    path = tmp_path / "norm.ckpt"
    save_checkpoint(normalized, {"run": "x"}, path)
    loaded, meta = load_checkpoint(path)
    assert meta["normalized"] == "linf"
    back = normalized_from_checkpoint(loaded, meta)
    np.testing.assert_allclose(back.rho, normalized.rho, rtol=1e-15)
    assert back.kind.label == "linf"
    assert back.net.dtype == np.float64
    # payload is 32-bit, so weights agree to f32 resolution
    for (_, la), (_, lb) in zip(normalized.net.weighted_layers(),
                                back.net.weighted_layers()):
        np.testing.assert_allclose(la.weight, lb.weight, atol=1e-6)


def test_checkpoint_is_deterministic_bytes(tmp_path):
    net = random_net("cifar3x24", std=0.05, seed=5)
    p1, p2 = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    save_checkpoint(net, {"k": "v"}, p1)
    save_checkpoint(net, {"k": "v"}, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"BAD!" + b"\0" * 64)
    with pytest.raises(FormatError, match="magic"):
        load_checkpoint(path)


def test_future_version_rejected(tmp_path):
    net = random_net("mnist3x34", seed=6)
    path = tmp_path / "v2.ckpt"
    save_checkpoint(net, {}, path)
    raw = bytearray(path.read_bytes())
    header_len = struct.unpack("<I", raw[4:8])[0]
    header = raw[8:8 + header_len].decode("utf-8")
    patched = header.replace("version = 1", "version = 2")
    path.write_bytes(bytes(raw[:8]) + patched.encode("utf-8") +
                     bytes(raw[8 + header_len:]))
    with pytest.raises(FormatError, match="version"):
        load_checkpoint(path)


def test_truncated_payload_rejected(tmp_path):
    net = random_net("mnist3x34", seed=7)
    path = tmp_path / "trunc.ckpt"
    save_checkpoint(net, {}, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-64])
    with pytest.raises(FormatError, match="floats"):
        load_checkpoint(path)


def test_truncated_header_rejected(tmp_path):
    path = tmp_path / "short.ckpt"
    path.write_bytes(MAGIC + struct.pack("<I", 10_000) + b"[checkpoint]")
    with pytest.raises(FormatError):
        load_checkpoint(path)


def test_missing_section_rejected(tmp_path):
    header = "[checkpoint]\nversion = 1\n"
    body = header.encode("utf-8")
    path = tmp_path / "nosec.ckpt"
    path.write_bytes(MAGIC + struct.pack("<I", len(body)) + body)
    with pytest.raises(FormatError):
        load_checkpoint(path)


def test_float_count_mismatch_rejected(tmp_path):
    net = random_net("mnist3x34", seed=8)
    path = tmp_path / "extra.ckpt"
    save_checkpoint(net, {}, path)
    path.write_bytes(path.read_bytes() + b"\0\0\0\0")
    with pytest.raises(FormatError, match="floats"):
        load_checkpoint(path)


def test_normalized_from_checkpoint_requires_rho():
    net = random_net("mnist3x34", seed=9)
    with pytest.raises(FormatError):
        normalized_from_checkpoint(net, {"normalized": "fro"})
