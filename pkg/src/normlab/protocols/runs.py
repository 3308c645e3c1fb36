"""The experiment protocols behind every sweep point.

Three ways to produce one (train loss, test loss) point: pretrain on
label-corrupted data then train clean; train from a given init std; train
on fully random labels.  All three end the same way: pick the snapshot
closest to the reference training loss, evaluate it raw, normalize it,
evaluate again.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from normlab.analysis.evaluate import evaluate
from normlab.data.corrupt import corrupt_labels, randomize_all_labels
from normlab.engine.network import build_architecture
from normlab.engine.optim import OptimizerState, init_gaussian
from normlab.normalize.absorb import absorb_batchnorm
from normlab.normalize.layerwise import norm_kind_from_name, normalize_layerwise
from normlab.protocols.config import datasets_from_config
from normlab.protocols.training import select_snapshot, train

# Seed-derivation roles.  Initialization always uses the raw master seed so
# every sweep point starts from the same weights.
_ROLE_CORRUPT = 1
_ROLE_PRETRAIN_SHUFFLE = 2
_ROLE_TRAIN_SHUFFLE = 3
_ROLE_RL_LABELS = 4
_ROLE_RL_SHUFFLE = 5


def derive_seed(master_seed, role, index=0):
    """A stable, well-mixed integer seed for (master, role, sweep point)."""
    ss = np.random.SeedSequence([int(master_seed), int(role), int(index)])
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class RunRecord:
    """Everything one sweep point contributes to the fits and the table."""

    sweep_kind: str  # corruption | init_std | random_labels
    sweep_value: float
    selected: object  # the chosen Snapshot (weights included)
    train_loss: float
    train_err: float
    test_loss: float
    test_err: float
    norm_train_loss: float
    norm_test_loss: float
    norm_train_err: float
    norm_test_err: float
    product_norm: float
    rho: np.ndarray
    norm_kind: str
    seeds: dict
    epochs: int
    flagged: bool
    normalized: object  # NormalizedNetwork of the selected snapshot


def _optimizer(cfg, seed):
    return OptimizerState(learning_rate=cfg.learning_rate,
                          momentum=cfg.momentum, batch_size=cfg.batch_size,
                          seed=seed)


def _finish_point(cfg, sweep_kind, sweep_value, snapshots, train_eval_ds,
                  test_ds, seeds, epochs):
    """Select, evaluate, normalize, re-evaluate; assemble the record."""
    snap = select_snapshot(snapshots, cfg.reference_loss)
    flagged = snap.train_loss > cfg.selection_band * cfg.reference_loss
    if flagged:
        warnings.warn(
            f"{sweep_kind}={sweep_value}: no snapshot within "
            f"{cfg.selection_band}x the reference loss {cfg.reference_loss} "
            f"(best {snap.train_loss:.6f} at epoch {snap.epoch}); "
            f"recording it anyway")
    net = snap.checkpoint
    test_rep = evaluate(net, test_ds, batch_size=cfg.eval_batch_size)

    kind = norm_kind_from_name(cfg.norm)
    stack = net
    if any(layer.kind == "batchnorm" for layer in net.layers):
        stack = absorb_batchnorm(net)
    normalized = normalize_layerwise(stack, kind)
    norm_train = evaluate(normalized, train_eval_ds,
                          batch_size=cfg.eval_batch_size)
    norm_test = evaluate(normalized, test_ds, batch_size=cfg.eval_batch_size)

    return RunRecord(
        sweep_kind=sweep_kind, sweep_value=float(sweep_value), selected=snap,
        train_loss=snap.train_loss, train_err=snap.train_err,
        test_loss=test_rep.loss, test_err=test_rep.error,
        norm_train_loss=norm_train.loss, norm_test_loss=norm_test.loss,
        norm_train_err=norm_train.error, norm_test_err=norm_test.error,
        product_norm=normalized.rho_product, rho=normalized.rho,
        norm_kind=kind.label, seeds=seeds, epochs=epochs, flagged=flagged,
        normalized=normalized)


def run_pretrain_point(cfg, index, fraction, train_ds, test_ds, log_every=0):
    """Corrupt-pretrain then clean-train one corruption fraction."""
    seeds = {
        "init": cfg.master_seed,
        "corrupt": derive_seed(cfg.master_seed, _ROLE_CORRUPT, index),
        "pretrain_shuffle": derive_seed(cfg.master_seed,
                                        _ROLE_PRETRAIN_SHUFFLE, index),
        "train_shuffle": derive_seed(cfg.master_seed, _ROLE_TRAIN_SHUFFLE,
                                     index),
    }
    net = build_architecture(cfg.architecture, cfg.class_count)
    init_gaussian(net, cfg.init_std, seed=seeds["init"])
    corrupted, _ = corrupt_labels(train_ds, fraction, seeds["corrupt"])
    train(net, corrupted, _optimizer(cfg, seeds["pretrain_shuffle"]),
          cfg.pretrain_epochs, eval_batch_size=cfg.eval_batch_size,
          snapshot_each_epoch=False)
    # Fresh optimizer: pretraining only sets the starting weights, its
    # momentum does not carry over.
    snapshots = train(net, train_ds, _optimizer(cfg, seeds["train_shuffle"]),
                      cfg.train_epochs, eval_batch_size=cfg.eval_batch_size,
                      log_every=log_every)
    return _finish_point(cfg, "corruption", fraction, snapshots, train_ds,
                         test_ds, seeds, cfg.train_epochs)


def run_init_std_point(cfg, index, std, train_ds, test_ds, log_every=0):
    """Train one initialization standard deviation."""
    seeds = {
        "init": cfg.master_seed,
        "train_shuffle": derive_seed(cfg.master_seed, _ROLE_TRAIN_SHUFFLE,
                                     index),
    }
    net = build_architecture(cfg.architecture, cfg.class_count)
    init_gaussian(net, std, seed=seeds["init"])
    snapshots = train(net, train_ds, _optimizer(cfg, seeds["train_shuffle"]),
                      cfg.train_epochs, eval_batch_size=cfg.eval_batch_size,
                      log_every=log_every)
    return _finish_point(cfg, "init_std", std, snapshots, train_ds, test_ds,
                         seeds, cfg.train_epochs)


def run_random_label_point(cfg, train_ds=None, test_ds=None, log_every=0):
    """Train on one random labelling of the training set.

    Training and train evaluation share the same label draw; the test set
    keeps its natural labels, so test error lands at chance while the net
    memorizes its way to zero train error.
    """
    if train_ds is None or test_ds is None:
        train_ds, test_ds = datasets_from_config(cfg)
    seeds = {
        "init": cfg.master_seed,
        "rl_labels": derive_seed(cfg.master_seed, _ROLE_RL_LABELS),
        "train_shuffle": derive_seed(cfg.master_seed, _ROLE_RL_SHUFFLE),
    }
    net = build_architecture(cfg.architecture, cfg.class_count)
    init_gaussian(net, cfg.rl_std, seed=seeds["init"])
    rl_train = randomize_all_labels(train_ds, seeds["rl_labels"])
    snapshots = train(net, rl_train, _optimizer(cfg, seeds["train_shuffle"]),
                      cfg.rl_epochs, eval_batch_size=cfg.eval_batch_size,
                      log_every=log_every)
    return _finish_point(cfg, "random_labels", cfg.rl_std, snapshots,
                         rl_train, test_ds, seeds, cfg.rl_epochs)


def point_plan(cfg):
    """The sweep's points as (sweep_kind, index, value) in output order."""
    if cfg.protocol == "pretrain-sweep":
        plan = [("corruption", i, v) for i, v in enumerate(cfg.sweep)]
    elif cfg.protocol == "init-std-sweep":
        plan = [("init_std", i, v) for i, v in enumerate(cfg.sweep)]
    else:
        return [("random_labels", 0, cfg.rl_std)]
    if cfg.random_label_point:
        plan.append(("random_labels", 0, cfg.rl_std))
    return plan


def run_point(cfg, sweep_kind, index, value, train_ds, test_ds, log_every=0):
    """Run one planned point; uniform entry for worker pools."""
    if sweep_kind == "corruption":
        return run_pretrain_point(cfg, index, value, train_ds, test_ds,
                                  log_every)
    if sweep_kind == "init_std":
        return run_init_std_point(cfg, index, value, train_ds, test_ds,
                                  log_every)
    if sweep_kind == "random_labels":
        return run_random_label_point(cfg, train_ds, test_ds, log_every)
    raise ValueError(f"unknown sweep kind {sweep_kind!r}")


def run_pretrain_protocol(cfg, train_ds=None, test_ds=None, log_every=0):
    """One record per corruption fraction in the sweep."""
    if cfg.protocol != "pretrain-sweep":
        raise ValueError(f"config protocol is {cfg.protocol!r}, "
                         "expected 'pretrain-sweep'")
    if train_ds is None or test_ds is None:
        train_ds, test_ds = datasets_from_config(cfg)
    return [run_pretrain_point(cfg, i, fraction, train_ds, test_ds, log_every)
            for i, fraction in enumerate(cfg.sweep)]


def run_init_std_protocol(cfg, train_ds=None, test_ds=None, log_every=0):
    """One record per initialization std in the sweep."""
    if cfg.protocol != "init-std-sweep":
        raise ValueError(f"config protocol is {cfg.protocol!r}, "
                         "expected 'init-std-sweep'")
    if train_ds is None or test_ds is None:
        train_ds, test_ds = datasets_from_config(cfg)
    return [run_init_std_point(cfg, i, std, train_ds, test_ds, log_every)
            for i, std in enumerate(cfg.sweep)]


def run_protocol(cfg, train_ds=None, test_ds=None, log_every=0):
    """Dispatch on the configured protocol kind.

    An init-std sweep appends the random-label point when the config asks
    for one, which is how the headline figure gets its rightmost point.
    """
    if train_ds is None or test_ds is None:
        train_ds, test_ds = datasets_from_config(cfg)
    if cfg.protocol == "pretrain-sweep":
        records = run_pretrain_protocol(cfg, train_ds, test_ds, log_every)
        if cfg.random_label_point:
            records.append(run_random_label_point(cfg, train_ds, test_ds,
                                                  log_every))
        return records
    if cfg.protocol == "init-std-sweep":
        records = run_init_std_protocol(cfg, train_ds, test_ds, log_every)
        if cfg.random_label_point:
            records.append(run_random_label_point(cfg, train_ds, test_ds,
                                                  log_every))
        return records
    return [run_random_label_point(cfg, train_ds, test_ds, log_every)]
