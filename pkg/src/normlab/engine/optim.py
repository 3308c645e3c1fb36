"""Gaussian initialization and SGD with classical momentum."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class OptimizerState:
    """SGD hyperparameters plus per-parameter momentum velocities.

    The same (seed, config) pair always reproduces the same weight
    trajectory; velocities are keyed by (layer index, parameter name).
    """

    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 64
    seed: int = 0
    epoch: int = 0
    velocities: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("minibatch size must be a positive integer")


def sgd_step(net, grads, opt):
    """One SGD update: v <- momentum*v + g; w <- w - lr*v.  Mutates ``net``.

    With momentum = 0 this reduces to plain gradient descent.
    """
    for i, name, arr in net.param_items():
        g = grads[i][name]
        key = (i, name)
        v = opt.velocities.get(key)
        if v is None:
            v = np.zeros_like(arr)
            opt.velocities[key] = v
        v *= opt.momentum
        v += g
        arr -= (opt.learning_rate * v).astype(arr.dtype)
    return net


def init_gaussian(net, std, seed):
    """Draw every conv/dense weight i.i.d. from N(0, std^2); zero the biases.

    Batch-norm layers are reset to the identity transform (gamma 1, beta 0,
    running mean 0, running variance 1).  Draw order follows layer
    declaration order, so a seed fully determines the weights.  Mutates and
    returns ``net``.
    """
    if std < 0:
        raise ValueError("std must be >= 0")
    rng = np.random.default_rng(seed)
    for layer in net.layers:
        if layer.kind in ("conv", "dense"):
            layer.weight[...] = rng.normal(0.0, std, layer.weight.shape).astype(
                layer.weight.dtype)
            if layer.bias is not None:
                layer.bias[...] = 0
        elif layer.kind == "batchnorm":
            layer.gamma[...] = 1
            layer.beta[...] = 0
            layer.running_mean[...] = 0
            layer.running_var[...] = 1
    return net
