"""Binary network checkpoints.

Layout: magic ``NGC1``, a 4-byte little-endian header length, a UTF-8
INI-style header describing the layer stack and carrying free-form metadata,
then every parameter and state array as little-endian float32 in layer
declaration order, row-major.  Storage is 32-bit by contract; float64 nets
(normalized ones) are rounded on save.
"""

from __future__ import annotations

import configparser
import io
from pathlib import Path

import numpy as np

from normlab.engine.layers import LayerSpec, layer_from_spec
from normlab.engine.network import Network
from normlab.errors import FormatError
from normlab.normalize.layerwise import (
    NormalizedNetwork,
    norm_kind_from_name,
)

MAGIC = b"NGC1"
VERSION = 1


def _layer_line(layer):
    s = layer.spec
    parts = [s.kind, s.filters, s.kernel_h, s.kernel_w, s.stride,
             int(s.has_bias), s.fan_in, s.fan_out]
    if s.kind == "batchnorm":
        parts += [repr(layer.eps), repr(layer.momentum)]
    return ",".join(str(p) for p in parts)


def _layer_from_line(line):
    parts = line.split(",")
    if len(parts) < 8:
        raise FormatError(f"malformed layer line {line!r}")
    spec = LayerSpec(kind=parts[0], filters=int(parts[1]),
                     kernel_h=int(parts[2]), kernel_w=int(parts[3]),
                     stride=int(parts[4]), has_bias=bool(int(parts[5])),
                     fan_in=int(parts[6]), fan_out=int(parts[7]))
    if spec.kind == "batchnorm" and len(parts) >= 10:
        layer = layer_from_spec(spec, eps=float(parts[8]))
        layer.momentum = float(parts[9])
        return layer
    return layer_from_spec(spec)


def _arrays(net):
    """Every persisted array in declaration order: params, then state."""
    for layer in net.layers:
        for arr in layer.params().values():
            yield arr
        for arr in layer.state().values():
            yield arr


def save_checkpoint(net, meta, path):
    """Write a network (or NormalizedNetwork) plus metadata to ``path``.

    Metadata values are stored as strings.  Saving a NormalizedNetwork adds
    the ``normalized`` kind flag and the full-precision rho vector to the
    header so the scales survive the round trip.
    """
    meta = {str(k): str(v) for k, v in (meta or {}).items()}
    if isinstance(net, NormalizedNetwork):
        meta["normalized"] = net.kind.label
        meta["rho"] = ",".join(repr(float(r)) for r in net.rho)
        net = net.net

    header = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    header["checkpoint"] = {
        "version": str(VERSION),
        "name": net.name,
        "input_shape": ",".join(str(d) for d in net.input_shape),
        "class_count": str(net.class_count),
        "floats": str(sum(arr.size for arr in _arrays(net))),
    }
    header["layers"] = {f"l{i}": _layer_line(layer)
                        for i, layer in enumerate(net.layers)}
    header["meta"] = meta
    buf = io.StringIO()
    header.write(buf)
    header_bytes = buf.getvalue().encode("utf-8")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(len(header_bytes).to_bytes(4, "little"))
        f.write(header_bytes)
        for arr in _arrays(net):
            f.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    return path


def load_checkpoint(path):
    """Read a checkpoint back into a float32 Network.

    Returns ``(net, meta)``.  The meta dict includes any ``normalized`` /
    ``rho`` entries written by :func:`save_checkpoint`; use
    :func:`normalized_from_checkpoint` to reassemble a NormalizedNetwork.
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise FormatError(f"{path}: not a checkpoint (bad magic)")
    header_len = int.from_bytes(raw[4:8], "little")
    if len(raw) < 8 + header_len:
        raise FormatError(f"{path}: truncated header")
    header = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    try:
        header.read_string(raw[8:8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, configparser.Error) as exc:
        raise FormatError(f"{path}: unreadable header ({exc})") from exc
    if not header.has_section("checkpoint"):
        raise FormatError(f"{path}: header missing checkpoint section")
    version = header.getint("checkpoint", "version", fallback=-1)
    if version != VERSION:
        raise FormatError(
            f"{path}: unsupported checkpoint version {version}; "
            f"this build reads version {VERSION}")

    try:
        input_shape = tuple(int(d) for d in
                            header.get("checkpoint", "input_shape").split(","))
        class_count = header.getint("checkpoint", "class_count")
        name = header.get("checkpoint", "name")
        layers = [_layer_from_line(header.get("layers", key))
                  for key in sorted(header["layers"], key=lambda k: int(k[1:]))]
    except (configparser.Error, ValueError) as exc:
        raise FormatError(f"{path}: malformed header ({exc})") from exc
    net = Network(layers, input_shape, class_count, name)

    expected = sum(arr.size for arr in _arrays(net))
    declared = header.getint("checkpoint", "floats", fallback=expected)
    if declared != expected:
        raise FormatError(
            f"{path}: header declares {declared} floats but the layer "
            f"stack holds {expected}")
    payload = np.frombuffer(raw, dtype="<f4", offset=8 + header_len)
    if payload.size != expected:
        raise FormatError(
            f"{path}: payload holds {payload.size} floats, expected {expected}")
    pos = 0
    for arr in _arrays(net):
        arr[...] = payload[pos:pos + arr.size].reshape(arr.shape)
        pos += arr.size

    meta = dict(header["meta"]) if header.has_section("meta") else {}
    return net, meta


def normalized_from_checkpoint(net, meta):
    """Rebuild the NormalizedNetwork wrapper from a loaded checkpoint pair."""
    if "normalized" not in meta:
        raise ValueError("checkpoint metadata carries no normalization flag")
    if "rho" not in meta:
        raise FormatError("normalized checkpoint metadata lacks rho scales")
    rho = np.array([float(r) for r in meta["rho"].split(",")],
                   dtype=np.float64)
    return NormalizedNetwork(net=net.astype(np.float64), rho=rho,
                             kind=norm_kind_from_name(meta["normalized"]),
                             source_digest=meta.get("source_digest", ""))
