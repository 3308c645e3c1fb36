"""Layer implementations: valid 2-D convolution, ReLU, batch norm, dense.

Every layer exposes the same small surface:

* ``params()``             ordered dict of trainable arrays
* ``state()``              ordered dict of non-trainable arrays (BN statistics)
* ``forward(x, mode)``     returns ``(output, cache)`` and never mutates the layer
* ``backward(cache, g)``   returns ``(grad_input, grads-per-param)``

``mode`` is ``"train"`` or ``"eval"``; it only changes batch-norm behaviour.
Forward passes are pure so the same layer can be evaluated concurrently; the
training loop applies batch-norm running-statistic updates explicitly via
``BatchNorm2D.update_running`` using values recorded in the cache.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from normlab.kernels import col2im, conv_output_size, im2col

MODES = ("train", "eval")


@dataclass(frozen=True)
class LayerSpec:
    """Shape-level description of one layer, enough to rebuild it unweighted."""

    kind: str  # conv | relu | batchnorm | dense
    filters: int = 0  # conv: out channels; bn: channels; dense: out features
    kernel_h: int = 0
    kernel_w: int = 0
    stride: int = 1
    has_bias: bool = False
    fan_in: int = 0  # conv: in channels; dense: in features
    fan_out: int = 0

    def __post_init__(self):
        if self.kind == "conv":
            if self.kernel_h < 1 or self.kernel_w < 1:
                raise ValueError("conv kernel extents must be >= 1")
            if self.stride < 1:
                raise ValueError("conv stride must be >= 1")
        if self.kind == "dense" and (self.fan_in < 1 or self.fan_out < 1):
            raise ValueError("dense layers record exact input/output widths")


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


class Conv2D:
    """Valid (no padding) 2-D convolution with a square stride.

    Weight layout is (out_channels, in_channels, kh, kw).  Forward runs
    im2col + one BLAS matmul per batch; backward reuses the cached columns.
    """

    kind = "conv"

    def __init__(self, in_channels, out_channels, kernel, stride=1, has_bias=False,
                 dtype=np.float32):
        kh, kw = kernel
        self.spec = LayerSpec("conv", filters=out_channels, kernel_h=kh, kernel_w=kw,
                              stride=stride, has_bias=has_bias, fan_in=in_channels,
                              fan_out=out_channels)
        self.weight = np.zeros((out_channels, in_channels, kh, kw), dtype=dtype)
        self.bias = np.zeros(out_channels, dtype=dtype) if has_bias else None

    def params(self):
        out = {"weight": self.weight}
        if self.bias is not None:
            out["bias"] = self.bias
        return out

    def state(self):
        return {}

    def out_shape(self, in_shape):
        c, h, w = in_shape
        if c != self.spec.fan_in:
            raise ValueError(f"conv expects {self.spec.fan_in} channels, got {c}")
        s = self.spec
        ho, wo = conv_output_size(h, w, s.kernel_h, s.kernel_w, s.stride, s.stride)
        return (s.filters, ho, wo)

    def forward(self, x, mode="eval"):
        _check_mode(mode)
        s = self.spec
        b, c, h, w = x.shape
        ho, wo = conv_output_size(h, w, s.kernel_h, s.kernel_w, s.stride, s.stride)
        cols = im2col(np.ascontiguousarray(x), s.kernel_h, s.kernel_w, s.stride, s.stride)
        wmat = self.weight.reshape(s.filters, -1)
        out = np.matmul(wmat, cols)
        if self.bias is not None:
            out += self.bias[None, :, None]
        return out.reshape(b, s.filters, ho, wo), (x.shape, cols)

    def backward(self, cache, grad_out):
        x_shape, cols = cache
        b, c, h, w = x_shape
        s = self.spec
        go = grad_out.reshape(b, s.filters, -1)
        gw = np.matmul(go, cols.transpose(0, 2, 1)).sum(axis=0).reshape(self.weight.shape)
        grads = {"weight": gw}
        if self.bias is not None:
            grads["bias"] = go.sum(axis=(0, 2))
        gcols = np.matmul(self.weight.reshape(s.filters, -1).T, go)
        gx = col2im(np.ascontiguousarray(gcols), c, h, w,
                    s.kernel_h, s.kernel_w, s.stride, s.stride)
        return gx, grads


class ReLU:
    kind = "relu"

    def __init__(self, dtype=np.float32):
        self.spec = LayerSpec("relu")

    def params(self):
        return {}

    def state(self):
        return {}

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x, mode="eval"):
        _check_mode(mode)
        # np.maximum (unlike a mask select) lets NaN through, so the
        # network-level finite check still sees upstream blow-ups.
        return np.maximum(x, 0), x > 0

    def backward(self, cache, grad_out):
        return np.where(cache, grad_out, 0), {}


class BatchNorm2D:
    """Per-channel batch normalization over (batch, height, width).

    Train mode normalizes with the current batch statistics (biased variance);
    eval mode uses the running statistics.  Running statistics are updated
    only via :meth:`update_running`, never inside ``forward``.
    """

    kind = "batchnorm"

    def __init__(self, channels, eps=1e-5, momentum=0.1, dtype=np.float32):
        self.spec = LayerSpec("batchnorm", filters=channels, fan_in=channels,
                              fan_out=channels)
        self.eps = float(eps)
        self.momentum = float(momentum)
        self.gamma = np.ones(channels, dtype=dtype)
        self.beta = np.zeros(channels, dtype=dtype)
        self.running_mean = np.zeros(channels, dtype=dtype)
        self.running_var = np.ones(channels, dtype=dtype)

    def params(self):
        return {"gamma": self.gamma, "beta": self.beta}

    def state(self):
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def out_shape(self, in_shape):
        if in_shape[0] != self.spec.filters:
            raise ValueError(f"batchnorm expects {self.spec.filters} channels")
        return in_shape

    def forward(self, x, mode="eval"):
        _check_mode(mode)
        if mode == "train":
            mean = x.mean(axis=(0, 2, 3))
            var = x.var(axis=(0, 2, 3))
        else:
            mean = self.running_mean
            var = self.running_var
        if np.any(var + self.eps <= 0):
            raise ValueError("batchnorm variance + eps must be positive")
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[None, :, None, None]) * inv_std[None, :, None, None]
        y = self.gamma[None, :, None, None] * xhat + self.beta[None, :, None, None]
        return y, (mode, xhat, inv_std, mean, var)

    def backward(self, cache, grad_out):
        mode, xhat, inv_std, _, _ = cache
        gsum = grad_out.sum(axis=(0, 2, 3))
        gxhat_sum = (grad_out * xhat).sum(axis=(0, 2, 3))
        grads = {"gamma": gxhat_sum, "beta": gsum}
        g = self.gamma[None, :, None, None] * inv_std[None, :, None, None]
        if mode == "eval":
            return grad_out * g, grads
        m = grad_out.shape[0] * grad_out.shape[2] * grad_out.shape[3]
        gx = (g / m) * (m * grad_out
                        - gsum[None, :, None, None]
                        - xhat * gxhat_sum[None, :, None, None])
        return gx, grads

    def update_running(self, batch_mean, batch_var):
        m = self.momentum
        self.running_mean += m * (batch_mean.astype(self.running_mean.dtype)
                                  - self.running_mean)
        self.running_var += m * (batch_var.astype(self.running_var.dtype)
                                 - self.running_var)


class Dense:
    """Fully-connected layer; flattens any trailing dimensions of the input."""

    kind = "dense"

    def __init__(self, in_features, out_features, has_bias=False, dtype=np.float32):
        self.spec = LayerSpec("dense", filters=out_features, has_bias=has_bias,
                              fan_in=in_features, fan_out=out_features)
        self.weight = np.zeros((in_features, out_features), dtype=dtype)
        self.bias = np.zeros(out_features, dtype=dtype) if has_bias else None

    def params(self):
        out = {"weight": self.weight}
        if self.bias is not None:
            out["bias"] = self.bias
        return out

    def state(self):
        return {}

    def out_shape(self, in_shape):
        flat = int(np.prod(in_shape))
        if flat != self.spec.fan_in:
            raise ValueError(f"dense expects {self.spec.fan_in} inputs, got {flat}")
        return (self.spec.fan_out,)

    def forward(self, x, mode="eval"):
        _check_mode(mode)
        x2 = x.reshape(x.shape[0], -1)
        if x2.shape[1] != self.spec.fan_in:
            raise ValueError(
                f"dense expects {self.spec.fan_in} inputs, got {x2.shape[1]}")
        y = x2 @ self.weight
        if self.bias is not None:
            y = y + self.bias
        return y, (x.shape, x2)

    def backward(self, cache, grad_out):
        x_shape, x2 = cache
        grads = {"weight": x2.T @ grad_out}
        if self.bias is not None:
            grads["bias"] = grad_out.sum(axis=0)
        gx = grad_out @ self.weight.T
        return gx.reshape(x_shape), grads


def layer_from_spec(spec, dtype=np.float32, eps=1e-5):
    """Instantiate an unweighted layer from its :class:`LayerSpec`."""
    if spec.kind == "conv":
        return Conv2D(spec.fan_in, spec.filters, (spec.kernel_h, spec.kernel_w),
                      stride=spec.stride, has_bias=spec.has_bias, dtype=dtype)
    if spec.kind == "relu":
        return ReLU(dtype=dtype)
    if spec.kind == "batchnorm":
        return BatchNorm2D(spec.filters, eps=eps, dtype=dtype)
    if spec.kind == "dense":
        return Dense(spec.fan_in, spec.fan_out, has_bias=spec.has_bias, dtype=dtype)
    raise ValueError(f"unknown layer kind {spec.kind!r}")
