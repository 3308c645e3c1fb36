"""Fold batch-norm statistics into the preceding convolution.

After absorption the network is a plain conv/relu/dense stack whose
eval-mode outputs are unchanged, which makes it eligible for layerwise
normalization.
"""

from __future__ import annotations

import numpy as np

from normlab.engine.layers import Conv2D
from normlab.engine.network import Network


def absorb_batchnorm(net):
    """Return a BN-free network computing the same eval-mode function.

    Each batch-norm layer is folded into the conv directly before it:
    per output channel c,  W'_c = W_c * g_c  and  b'_c = (b_c - mu_c) * g_c
    + beta_c  with  g_c = gamma_c / sqrt(var_c + eps).  The folded network
    is carried in float64 (it is a verification artifact, not training
    state).  A network without batch norm comes back as a float64 copy.
    """
    src = net.astype(np.float64)
    layers = []
    for layer in src.layers:
        if layer.kind != "batchnorm":
            layers.append(layer)
            continue
        if not layers or layers[-1].kind != "conv":
            raise ValueError("batchnorm must directly follow a conv layer")
        conv = layers[-1]
        var = layer.running_var.astype(np.float64) + layer.eps
        if np.any(var <= 0):
            raise ValueError("running variance + eps must be positive")
        g = layer.gamma.astype(np.float64) / np.sqrt(var)
        bias = np.zeros(conv.spec.filters, dtype=np.float64) if conv.bias is None \
            else conv.bias.astype(np.float64)
        new_bias = (bias - layer.running_mean.astype(np.float64)) * g \
            + layer.beta.astype(np.float64)

        folded = Conv2D(conv.spec.fan_in, conv.spec.filters,
                        (conv.spec.kernel_h, conv.spec.kernel_w),
                        stride=conv.spec.stride, has_bias=True,
                        dtype=conv.weight.dtype)
        folded.weight[...] = (conv.weight.astype(np.float64)
                              * g[:, None, None, None]).astype(conv.weight.dtype)
        folded.bias[...] = new_bias.astype(conv.weight.dtype)
        layers[-1] = folded
    return Network(layers, src.input_shape, src.class_count, src.name)
