"""Sweep protocols: seed derivation, point plans, and record assembly."""

import numpy as np
import pytest

from normlab.analysis.evaluate import evaluate
from normlab.protocols.config import ExperimentConfig
from normlab.protocols.runs import (derive_seed, point_plan,
                                    run_init_std_point, run_point,
                                    run_pretrain_point,
                                    run_random_label_point)

from conftest import digit_dataset


def test_derive_seed_deterministic():
    assert derive_seed(5, 2, 3) == derive_seed(5, 2, 3)


def test_derive_seed_distinct_across_inputs():
    seeds = {derive_seed(m, r, i)
             for m in (0, 1, 99) for r in (1, 2, 3, 4, 5) for i in range(6)}
    assert len(seeds) == 3 * 5 * 6  # no collisions over the grid
    assert all(0 <= s < 2**32 for s in seeds)


def test_point_plan_init_std():
    cfg = ExperimentConfig(sweep=(0.01, 0.02, 0.04))
    assert point_plan(cfg) == [("init_std", 0, 0.01), ("init_std", 1, 0.02),
                               ("init_std", 2, 0.04)]


def test_point_plan_appends_random_label_point():
    cfg = ExperimentConfig(sweep=(0.01, 0.02), random_label_point=True,
                           rl_std=0.06)
    plan = point_plan(cfg)
    assert plan[-1] == ("random_labels", 0, 0.06)
    assert len(plan) == 3


def test_point_plan_pretrain():
    cfg = ExperimentConfig(protocol="pretrain-sweep", sweep=(0.0, 0.5))
    assert point_plan(cfg) == [("corruption", 0, 0.0), ("corruption", 1, 0.5)]


def test_point_plan_random_labels_only():
    cfg = ExperimentConfig(protocol="random-labels", rl_std=0.04)
    assert point_plan(cfg) == [("random_labels", 0, 0.04)]


def _tiny_cfg(**overrides):
    base = dict(architecture="mnist3x34", sweep=(0.02,), train_epochs=2,
                pretrain_epochs=1, rl_epochs=2, learning_rate=0.01,
                batch_size=32, eval_batch_size=64, reference_loss=0.5,
                selection_band=100.0, master_seed=9)
    base.update(overrides)
    return ExperimentConfig(**base)


@pytest.fixture(scope="module")
def tiny_data():
    return digit_dataset(96, seed=4), digit_dataset(48, seed=5)


def test_init_std_record(tiny_data):
    train_ds, test_ds = tiny_data
    cfg = _tiny_cfg()
    rec = run_init_std_point(cfg, 0, 0.02, train_ds, test_ds)
    assert rec.sweep_kind == "init_std"
    assert rec.sweep_value == 0.02
    assert rec.epochs == 2
    assert 1 <= rec.selected.epoch <= 2
    assert rec.seeds["init"] == 9
    assert rec.seeds["train_shuffle"] == derive_seed(9, 3, 0)

    # raw scalars match a fresh evaluation of the selected weights
    raw_train = evaluate(rec.selected.checkpoint, train_ds, batch_size=64)
    assert rec.train_loss == raw_train.loss
    assert rec.train_err == raw_train.error

    # the normalized copy computes the function at 1/product scale
    assert rec.product_norm == pytest.approx(float(np.prod(rec.rho)),
                                             rel=1e-12)
    assert len(rec.rho) == 3  # one scale per weighted layer
    assert all(r > 0 for r in rec.rho)
    x = train_ds.images[:8].astype(np.float64)
    raw_logits = rec.selected.checkpoint.astype(np.float64).forward(x)
    norm_logits = rec.normalized.net.forward(x)
    np.testing.assert_allclose(norm_logits * rec.product_norm, raw_logits,
                               rtol=1e-9)

    # normalized scalars come from the normalized net on both splits
    nt = evaluate(rec.normalized, train_ds, batch_size=64)
    assert rec.norm_train_loss == nt.loss
    assert rec.norm_train_err == nt.error
    assert rec.norm_kind == "fro"
    assert not rec.flagged  # selection_band is huge in this config


def test_init_std_point_deterministic(tiny_data):
    train_ds, test_ds = tiny_data
    cfg = _tiny_cfg()
    a = run_init_std_point(cfg, 0, 0.02, train_ds, test_ds)
    b = run_init_std_point(cfg, 0, 0.02, train_ds, test_ds)
    assert a.train_loss == b.train_loss
    assert a.norm_test_loss == b.norm_test_loss
    assert np.array_equal(a.rho, b.rho)


def test_sweep_index_changes_shuffle_only(tiny_data):
    train_ds, test_ds = tiny_data
    cfg = _tiny_cfg()
    a = run_init_std_point(cfg, 0, 0.02, train_ds, test_ds)
    b = run_init_std_point(cfg, 1, 0.02, train_ds, test_ds)
    # same init (master seed), different minibatch order
    assert a.seeds["init"] == b.seeds["init"]
    assert a.seeds["train_shuffle"] != b.seeds["train_shuffle"]
    assert a.train_loss != b.train_loss


def test_pretrain_record(tiny_data):
    train_ds, test_ds = tiny_data
    cfg = _tiny_cfg(protocol="pretrain-sweep")
    rec = run_pretrain_point(cfg, 0, 0.5, train_ds, test_ds)
    assert rec.sweep_kind == "corruption"
    assert rec.sweep_value == 0.5
    assert set(rec.seeds) == {"init", "corrupt", "pretrain_shuffle",
                              "train_shuffle"}
    assert rec.epochs == cfg.train_epochs


def test_random_label_record(tiny_data):
    train_ds, test_ds = tiny_data
    cfg = _tiny_cfg(protocol="random-labels", rl_std=0.03)
    rec = run_random_label_point(cfg, train_ds, test_ds)
    assert rec.sweep_kind == "random_labels"
    assert rec.sweep_value == 0.03
    assert rec.epochs == cfg.rl_epochs
    assert set(rec.seeds) == {"init", "rl_labels", "train_shuffle"}
    # train metrics are measured against the randomized labels, not the
    # natural ones
    natural = evaluate(rec.selected.checkpoint, train_ds, batch_size=64)
    assert rec.train_loss != natural.loss


def test_run_point_dispatch(tiny_data):
    train_ds, test_ds = tiny_data
    cfg = _tiny_cfg()
    rec = run_point(cfg, "init_std", 0, 0.02, train_ds, test_ds)
    direct = run_init_std_point(cfg, 0, 0.02, train_ds, test_ds)
    assert rec.train_loss == direct.train_loss
    with pytest.raises(ValueError, match="unknown sweep kind"):
        run_point(cfg, "dropout", 0, 0.1, train_ds, test_ds)


def test_unreachable_reference_flags_record(tiny_data):
    train_ds, test_ds = tiny_data
    cfg = _tiny_cfg(reference_loss=1e-9, selection_band=2.0)
    with pytest.warns(UserWarning, match="no snapshot within"):
        rec = run_init_std_point(cfg, 0, 0.02, train_ds, test_ds)
    assert rec.flagged
