"""Layerwise weight normalization under a choice of Lp norm.

ReLU nets are positively homogeneous: scaling any weighted layer by c > 0
scales the logits by c, so dividing layer k by its norm rho_k (and biases by
the cumulative product of rho up to k) yields a unit-norm network whose
logits are exactly the original logits divided by prod(rho).  Class
predictions are unchanged; only the cross-entropy scale moves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class NormKind:
    """Which Lp norm to use, with an optional post-divisor.

    p=2 is the elementwise (Frobenius) norm; p=inf is the max norm.  The
    divisor rescales the computed norm (L1 norms of big layers are huge, so
    the L1 variant conventionally divides by 100).
    """

    p: float = 2.0
    divisor: float = 1.0

    def __post_init__(self):
        if not (self.p >= 1.0 or math.isinf(self.p)):
            raise ValueError("p must be >= 1 or inf")
        if self.divisor <= 0:
            raise ValueError("divisor must be > 0")

    @property
    def label(self):
        if math.isinf(self.p):
            base = "linf"
        elif self.p == 2.0:
            base = "fro"
        elif self.p == int(self.p):
            base = f"l{int(self.p)}"
        else:
            base = f"l{self.p}"
        return base if self.divisor == 1.0 else f"{base}/{self.divisor:g}"


FROBENIUS = NormKind(2.0, 1.0)
L1_OVER_100 = NormKind(1.0, 100.0)
LINF = NormKind(math.inf, 1.0)

_BY_NAME = {"fro": FROBENIUS, "l2": FROBENIUS, "l1": L1_OVER_100, "linf": LINF,
            L1_OVER_100.label: L1_OVER_100}


def norm_kind_from_name(name):
    """Look up a norm by CLI name (fro | l2 | l1 | linf) or by its label."""
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown norm {name!r}; choose from {sorted(_BY_NAME)}")


@dataclass(frozen=True)
class NormalizedNetwork:
    """A unit-norm layer stack plus the scales that were divided out."""

    net: object
    rho: np.ndarray  # one scale per weighted layer, in layer order
    kind: NormKind
    source_digest: str = ""
    rho_product: float = field(init=False, default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "rho_product", float(np.prod(self.rho)))


def layer_norm(weights, bias, kind=FROBENIUS):
    """Lp norm of one layer's parameter block (weights and its own bias)."""
    parts = [np.asarray(weights, dtype=np.float64).ravel()]
    if bias is not None:
        parts.append(np.asarray(bias, dtype=np.float64).ravel())
    flat = np.concatenate(parts)
    if math.isinf(kind.p):
        value = float(np.abs(flat).max())
    elif kind.p == 2.0:
        value = float(np.sqrt(np.sum(flat * flat)))
    elif kind.p == 1.0:
        value = float(np.abs(flat).sum())
    else:
        value = float(np.sum(np.abs(flat) ** kind.p) ** (1.0 / kind.p))
    return value / kind.divisor


def layer_scales(net, kind=FROBENIUS):
    """The per-layer scale vector rho that layerwise normalization divides out.

    rho_k is the norm of layer k's block with its bias pre-divided by the
    product of the upstream scales, i.e. rho_k = ||W_k (+) b_k/prod(rho_<k)||.
    For bias-free layers and for the first layer this is just the plain
    block norm; the adjustment is what makes the normalized layer's block
    norm exactly 1 (x divisor) and normalization idempotent, while the
    cumulative bias rule keeps the network function an exact rescaling.
    """
    weighted = net.weighted_layers()
    rho = np.empty(len(weighted), dtype=np.float64)
    running = 1.0
    for k, (_, layer) in enumerate(weighted):
        bias = None if layer.bias is None else layer.bias.astype(np.float64) / running
        r = layer_norm(layer.weight, bias, kind)
        if r == 0.0:
            raise ValueError(f"weighted layer {k} has zero norm (dead layer)")
        rho[k] = r
        running *= r
    return rho


def normalize_layerwise(net, kind=FROBENIUS):
    """Divide each weighted layer by its scale; biases by the running product.

    Requires batch norm to have been absorbed first.  Layer k's bias is
    divided by rho_1*...*rho_k (not just rho_k): that is the unique rule
    under which ReLU composition commutes with the scaling, making the
    normalized logits exactly original/prod(rho).  The result is carried in
    float64: normalized nets are verification artifacts, not training
    state.
    """
    if any(layer.kind == "batchnorm" for layer in net.layers):
        raise ValueError("absorb batch norm before layerwise normalization")
    out = net.astype(np.float64)
    rho = layer_scales(out, kind)
    running = 1.0
    for k, (_, layer) in enumerate(out.weighted_layers()):
        running *= rho[k]
        layer.weight /= rho[k]
        if layer.bias is not None:
            layer.bias /= running
    return NormalizedNetwork(net=out, rho=rho, kind=kind,
                             source_digest=net.name)


def product_norm(net_or_normalized, kind=FROBENIUS):
    """Product over weighted layers of the layer scales.

    For a NormalizedNetwork this is the stored prod(rho); for a raw network
    the scales are computed on the spot.
    """
    if isinstance(net_or_normalized, NormalizedNetwork):
        return net_or_normalized.rho_product
    return float(np.prod(layer_scales(net_or_normalized, kind)))


def scale_layers(net, scales):
    """Multiply weighted layer k by scales[k] (biases by the running product)."""
    out = net.copy()
    weighted = out.weighted_layers()
    if len(scales) != len(weighted):
        raise ValueError(f"need {len(weighted)} scales, got {len(scales)}")
    running = 1.0
    for s, (_, layer) in zip(scales, weighted):
        if s <= 0:
            raise ValueError("scales must be positive")
        running *= s
        layer.weight[...] = (layer.weight.astype(np.float64) * s).astype(
            layer.weight.dtype)
        if layer.bias is not None:
            layer.bias[...] = (layer.bias.astype(np.float64) * running).astype(
                layer.bias.dtype)
    return out


def verify_homogeneity(net, scales, inputs, mode="eval"):
    """Check that scaling layers by ``scales`` scales logits by prod(scales).

    Returns a dict with the max relative deviation and the scale factor.
    """
    scales = np.asarray(scales, dtype=np.float64)
    base = net.forward(inputs, mode).astype(np.float64)
    scaled = scale_layers(net, scales).forward(inputs, mode).astype(np.float64)
    factor = float(np.prod(scales))
    expected = factor * base
    denom = np.maximum(np.abs(expected), np.abs(scaled))
    denom = np.where(denom == 0, 1.0, denom)
    deviation = float(np.max(np.abs(scaled - expected) / denom))
    return {"factor": factor, "max_relative_deviation": deviation,
            "n_inputs": int(inputs.shape[0])}
