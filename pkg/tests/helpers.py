"""Finite-difference gradient checks shared by the unit and acceptance tests.

All checks run in float64.  ReLU is piecewise linear, so instances whose
pre-activations sit within ~10 step sizes of a kink are filtered out before
differencing; everything else must match centrally differenced gradients to
the stated relative tolerance.
"""

import numpy as np

from normlab.engine.losses import loss_crossentropy

H = 1e-6
KINK_MARGIN = 10 * H


def _close(analytic, numeric, rtol):
    return np.isclose(analytic, numeric, rtol=rtol, atol=1e-7)


def _sample_indices(arr, count, rng):
    flat = arr.size
    if flat <= count:
        return np.arange(flat)
    return rng.choice(flat, size=count, replace=False)


def gradcheck_layer(layer, x, mode="eval", rtol=1e-4, sample=12, seed=0):
    """Central-difference check of one layer's input and parameter gradients.

    The scalar objective is sum(out * g) for a fixed random g, whose exact
    gradient the layer's backward must reproduce.
    """
    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=np.float64)
    out, cache = layer.forward(x, mode)
    g = rng.normal(size=out.shape)
    gx, grads = layer.backward(cache, g)

    def objective(xv):
        return float(np.sum(layer.forward(xv, mode)[0] * g))

    for idx in _sample_indices(x, sample, rng):
        pos = np.unravel_index(idx, x.shape)
        step = H * max(1.0, abs(x[pos]))
        xp = x.copy()
        xp[pos] += step
        xm = x.copy()
        xm[pos] -= step
        numeric = (objective(xp) - objective(xm)) / (2 * step)
        assert _close(gx[pos], numeric, rtol), \
            f"input grad at {pos}: analytic {gx[pos]}, numeric {numeric}"

    for name, param in layer.params().items():
        for idx in _sample_indices(param, sample, rng):
            pos = np.unravel_index(idx, param.shape)
            orig = param[pos]
            step = H * max(1.0, abs(orig))
            param[pos] = orig + step
            up = objective(x)
            param[pos] = orig - step
            down = objective(x)
            param[pos] = orig
            numeric = (up - down) / (2 * step)
            assert _close(grads[name][pos], numeric, rtol), \
                f"{name} grad at {pos}: analytic {grads[name][pos]}, " \
                f"numeric {numeric}"


def relu_kink_free(net, x, margin=KINK_MARGIN):
    """True when no ReLU input sits within ``margin`` of zero."""
    h = x
    for layer in net.layers:
        if layer.kind == "relu" and float(np.min(np.abs(h))) < margin:
            return False
        h, _ = layer.forward(h, "train")
    return True


def gradcheck_network(net, x, labels, rtol=1e-4, sample=4, seed=0,
                      mode="train"):
    """Check backprop of the mean cross-entropy through a whole network."""
    from normlab.engine.network import backward

    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=np.float64)
    grads, _ = backward(net, x, labels, mode)

    def objective():
        return loss_crossentropy(net.forward(x, mode), labels)

    for i, layer in enumerate(net.layers):
        for name, param in layer.params().items():
            for idx in _sample_indices(param, sample, rng):
                pos = np.unravel_index(idx, param.shape)
                orig = param[pos]
                step = H * max(1.0, abs(orig))
                param[pos] = orig + step
                up = objective()
                param[pos] = orig - step
                down = objective()
                param[pos] = orig
                numeric = (up - down) / (2 * step)
                assert _close(grads[i][name][pos], numeric, rtol), \
                    f"layer {i} {name} at {pos}: " \
                    f"analytic {grads[i][name][pos]}, numeric {numeric}"
