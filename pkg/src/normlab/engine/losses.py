"""Loss functions and classification error."""

from __future__ import annotations

import numpy as np


def _check_labels(labels, class_count):
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= class_count):
        raise ValueError(
            f"labels must lie in [0, {class_count}), got range "
            f"[{labels.min()}, {labels.max()}]")
    return labels


def crossentropy_per_example(logits, labels):
    """Per-row -log softmax probability of the true class, in float64.

    Stabilized with log-sum-exp regardless of the logits' storage precision.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = _check_labels(labels, logits.shape[1])
    m = logits.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(logits - m).sum(axis=1))
    true = logits[np.arange(len(labels)), labels]
    return lse - true


def loss_crossentropy(logits, labels):
    """Mean over the batch of -log softmax probability of the true class."""
    return float(np.mean(crossentropy_per_example(logits, labels)))


def softmax_ce_grad(logits, labels):
    """Gradient of the minibatch-mean cross-entropy w.r.t. the logits."""
    labels = _check_labels(labels, logits.shape[1])
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=1, keepdims=True)
    p[np.arange(len(labels)), labels] -= 1.0
    return (p / len(labels)).astype(logits.dtype)


def loss_binary_logistic(scores, labels):
    """Sum over points of ln(1 + exp(-y*f)) for labels y in {-1, +1}.

    Note the summation (not mean) convention.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.size == 0:
        raise ValueError("empty input")
    if not np.all(np.isin(labels, (-1, 1))):
        raise ValueError("labels must be -1 or +1")
    return float(np.logaddexp(0.0, -labels * scores).sum())


def classification_error(logits, labels):
    """Fraction of rows whose argmax differs from the label.

    Ties take the lowest class index (numpy argmax convention), so a row
    like [1, 1, 0] counts as class 0.
    """
    logits = np.asarray(logits)
    labels = _check_labels(labels, logits.shape[1])
    pred = logits.argmax(axis=1)
    return float(np.mean(pred != labels))
