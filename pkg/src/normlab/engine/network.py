"""Network container, the architecture catalog, and forward/backward passes."""

from __future__ import annotations

import numpy as np

from normlab.engine.layers import (
    BatchNorm2D,
    Conv2D,
    Dense,
    ReLU,
    layer_from_spec,
)
from normlab.engine.losses import softmax_ce_grad
from normlab.errors import NonFiniteError

ARCHITECTURES = ("cifar3x24", "mnist3x34", "conv5")
CLASS_COUNTS = (2, 10, 100)


class Network:
    """An ordered layer stack with a fixed input shape and class count.

    Layers chain-check their shapes at construction, so a mis-wired stack
    fails immediately rather than at first forward.
    """

    def __init__(self, layers, input_shape, class_count, name="custom"):
        self.layers = list(layers)
        self.input_shape = tuple(int(d) for d in input_shape)
        self.class_count = int(class_count)
        self.name = name
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.out_shape(shape)
        if shape != (self.class_count,):
            raise ValueError(
                f"layer stack produces {shape}, expected ({self.class_count},)")

    @property
    def dtype(self):
        for layer in self.layers:
            for arr in layer.params().values():
                return arr.dtype
        return np.dtype(np.float32)

    def specs(self):
        return [layer.spec for layer in self.layers]

    def param_count(self):
        """Number of trainable scalars (conv/dense weights+biases, BN gamma/beta)."""
        return sum(arr.size for layer in self.layers
                   for arr in layer.params().values())

    def param_items(self):
        """Ordered (layer_index, name, array) triples over trainable arrays."""
        for i, layer in enumerate(self.layers):
            for name, arr in layer.params().items():
                yield i, name, arr

    def weighted_layers(self):
        """(index, layer) pairs for layers carrying a weight matrix."""
        return [(i, l) for i, l in enumerate(self.layers) if l.kind in ("conv", "dense")]

    def copy(self):
        return self.astype(self.dtype)

    def astype(self, dtype):
        """Deep copy with every parameter and state array cast to ``dtype``."""
        clone = Network.__new__(Network)
        clone.input_shape = self.input_shape
        clone.class_count = self.class_count
        clone.name = self.name
        clone.layers = []
        for layer in self.layers:
            eps = getattr(layer, "eps", 1e-5)
            new = layer_from_spec(layer.spec, dtype=dtype, eps=eps)
            for name, arr in layer.params().items():
                getattr(new, name)[...] = arr.astype(dtype)
            for name, arr in layer.state().items():
                getattr(new, name)[...] = arr.astype(dtype)
            if layer.kind == "batchnorm":
                new.momentum = layer.momentum
            clone.layers.append(new)
        return clone

    def forward(self, batch, mode="eval", with_caches=False):
        """Run the stack on a batch (B, C, H, W); returns logits (B, classes).

        Raises :class:`NonFiniteError` if the logits contain NaN/Inf.
        """
        if batch.ndim != 4 or batch.shape[1:] != self.input_shape:
            raise ValueError(
                f"batch shape {batch.shape} does not match input {self.input_shape}")
        x = batch
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x, mode)
            caches.append(cache)
        if not np.all(np.isfinite(x)):
            raise NonFiniteError("non-finite activation in forward pass")
        if with_caches:
            return x, caches
        return x


def forward(net, batch, mode="eval"):
    """Functional alias for :meth:`Network.forward`."""
    return net.forward(batch, mode)


def backward_from_caches(net, caches, logits, labels):
    """Backpropagate the minibatch-mean cross-entropy through cached layers.

    Returns ``grads`` where ``grads[i]`` is a dict matching
    ``net.layers[i].params()`` keys (empty for parameter-free layers).
    """
    grad = softmax_ce_grad(logits, labels)
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        grad, layer_grads = net.layers[i].backward(caches[i], grad)
        grads[i] = layer_grads
    for layer_grads in grads:
        for name, g in layer_grads.items():
            if not np.all(np.isfinite(g)):
                raise NonFiniteError(f"non-finite gradient for {name!r}")
    return grads


def backward(net, batch, labels, mode="train"):
    """Gradients of the minibatch-mean cross-entropy w.r.t. every trainable array.

    Returns ``(grads, logits)``; see :func:`backward_from_caches`.
    """
    logits, caches = net.forward(batch, mode, with_caches=True)
    return backward_from_caches(net, caches, logits, labels), logits


def param_count(net):
    return net.param_count()


def build_architecture(name, class_count=10):
    """Construct one of the three catalog networks.

    cifar3x24   3x32x32 input; two 5x5 valid conv layers of 24 filters
                (bias on the first only), ReLU after each, final dense.
    mnist3x34   1x28x28 input; same shape with 34 filters.
    conv5       3x32x32 input; four 3x3 stride-2 conv layers of
                32/64/64/128 filters, each followed by batch norm and
                ReLU, final dense.
    """
    if name not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {name!r}; choose from {ARCHITECTURES}")
    if class_count not in CLASS_COUNTS:
        raise ValueError(f"class_count must be one of {CLASS_COUNTS}")

    if name == "cifar3x24":
        layers = [
            Conv2D(3, 24, (5, 5), stride=1, has_bias=True),
            ReLU(),
            Conv2D(24, 24, (5, 5), stride=1, has_bias=False),
            ReLU(),
            Dense(24 * 24 * 24, class_count, has_bias=False),
        ]
        return Network(layers, (3, 32, 32), class_count, name)

    if name == "mnist3x34":
        layers = [
            Conv2D(1, 34, (5, 5), stride=1, has_bias=True),
            ReLU(),
            Conv2D(34, 34, (5, 5), stride=1, has_bias=False),
            ReLU(),
            Dense(34 * 20 * 20, class_count, has_bias=False),
        ]
        return Network(layers, (1, 28, 28), class_count, name)

    # conv5: strides keep the dense layer small; 32 -> 15 -> 7 -> 3 -> 1.
    layers = []
    in_ch = 3
    for filters in (32, 64, 64, 128):
        layers.append(Conv2D(in_ch, filters, (3, 3), stride=2, has_bias=False))
        layers.append(BatchNorm2D(filters))
        layers.append(ReLU())
        in_ch = filters
    layers.append(Dense(128, class_count, has_bias=False))
    return Network(layers, (3, 32, 32), class_count, "conv5")
