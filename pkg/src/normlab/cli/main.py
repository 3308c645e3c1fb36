"""Command-line orchestration: ingest, sweep, normalize, evaluate, fit, report.

Every command is deterministic given its config and seed, prints its
machine-readable result (JSON) to stdout, keeps progress chatter on stderr,
and exits non-zero on any invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from scipy.stats import spearmanr

from normlab.analysis.bounds import bound_report
from normlab.analysis.evaluate import evaluate
from normlab.analysis.fits import linear_fit
from normlab.analysis.minnorm import min_norm_gd_demo
from normlab.cli.plotdata import (
    write_output_histograms,
    write_panels,
)
from normlab.cli.results import ResultsTable
from normlab.data.loaders import file_digest
from normlab.engine.network import forward
from normlab.errors import NormlabError
from normlab.normalize.absorb import absorb_batchnorm
from normlab.normalize.layerwise import (
    norm_kind_from_name,
    normalize_layerwise,
)
from normlab.protocols.checkpoint import (
    load_checkpoint,
    normalized_from_checkpoint,
    save_checkpoint,
)
from normlab.protocols.config import (
    config_from_dict,
    datasets_from_config,
    parse_config,
)
from normlab.protocols.runs import RunRecord, point_plan, run_point
from normlab.protocols.training import Snapshot


def _echo(msg):
    print(msg, file=sys.stderr)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _emit(obj):
    print(json.dumps(obj, indent=2, default=_jsonable))


def _apply_overrides(cfg, args):
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["master_seed"] = args.seed
    if getattr(args, "norm", None) is not None:
        updates["norm"] = args.norm
    if getattr(args, "subset_size", None) is not None:
        updates["subset_size"] = args.subset_size
    return dataclasses.replace(cfg, **updates) if updates else cfg


# ----------------------------------------------------------------- ingest

def _dataset_manifest(ds):
    prov = ds.provenance
    return {
        "n_examples": len(ds),
        "class_count": ds.class_count,
        "image_shape": list(ds.image_shape),
        "source": prov.source,
        "source_digest": prov.source_digest,
        "standardizer": prov.standardizer_id,
        "notes": prov.notes,
    }


def cmd_ingest(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    train, test = datasets_from_config(cfg)
    manifest = {"train": _dataset_manifest(train),
                "test": _dataset_manifest(test)}
    out = Path(args.out) if args.out else Path(cfg.output_dir) / "manifest.json"
    text = json.dumps(manifest, indent=2, default=_jsonable)
    if out.exists() and out.read_text(encoding="utf-8") == text:
        _echo(f"{out} already up to date")
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        _echo(f"wrote {out}")
    _emit(manifest)
    return 0


# ------------------------------------------------------------------ sweep

def _point_paths(run_dir, index):
    stem = f"point_{index:03d}"
    return (run_dir / f"{stem}.ckpt", run_dir / f"{stem}.norm.ckpt",
            run_dir / f"{stem}.json")


def _record_scalars(record):
    return {
        "sweep_kind": record.sweep_kind,
        "sweep_value": record.sweep_value,
        "seeds": record.seeds,
        "epochs": record.epochs,
        "flagged": record.flagged,
        "selected_epoch": record.selected.epoch,
        "train_loss": record.train_loss,
        "train_err": record.train_err,
        "test_loss": record.test_loss,
        "test_err": record.test_err,
        "norm_kind": record.norm_kind,
        "norm_train_loss": record.norm_train_loss,
        "norm_test_loss": record.norm_test_loss,
        "norm_train_err": record.norm_train_err,
        "norm_test_err": record.norm_test_err,
        "product_norm": record.product_norm,
        "rho": [float(r) for r in record.rho],
    }


def _write_point(run_dir, index, record):
    ckpt_path, norm_path, meta_path = _point_paths(run_dir, index)
    meta = {"sweep_kind": record.sweep_kind,
            "sweep_value": record.sweep_value,
            "epoch": record.selected.epoch,
            "train_loss": record.train_loss,
            "train_err": record.train_err,
            "seed": record.seeds["init"]}
    save_checkpoint(record.selected.checkpoint, meta, ckpt_path)
    save_checkpoint(record.normalized, meta, norm_path)
    point = _record_scalars(record)
    point["checkpoint"] = ckpt_path.name
    point["checkpoint_digest"] = file_digest(ckpt_path)
    point["normalized_checkpoint"] = norm_path.name
    point["normalized_digest"] = file_digest(norm_path)
    meta_path.write_text(json.dumps(point, indent=2, default=_jsonable),
                         encoding="utf-8")


def _load_point(run_dir, index):
    """Rebuild a completed point's RunRecord, or None if absent/stale."""
    ckpt_path, norm_path, meta_path = _point_paths(run_dir, index)
    if not (meta_path.exists() and ckpt_path.exists() and norm_path.exists()):
        return None
    point = json.loads(meta_path.read_text(encoding="utf-8"))
    if (point.get("checkpoint_digest") != file_digest(ckpt_path)
            or point.get("normalized_digest") != file_digest(norm_path)):
        return None
    net, _ = load_checkpoint(ckpt_path)
    normalized = normalized_from_checkpoint(*load_checkpoint(norm_path))
    snap = Snapshot(epoch=point["selected_epoch"], checkpoint=net,
                    train_loss=point["train_loss"],
                    train_err=point["train_err"], stamp=0.0,
                    checkpoint_path=str(ckpt_path))
    return RunRecord(
        sweep_kind=point["sweep_kind"], sweep_value=point["sweep_value"],
        selected=snap, train_loss=point["train_loss"],
        train_err=point["train_err"], test_loss=point["test_loss"],
        test_err=point["test_err"],
        norm_train_loss=point["norm_train_loss"],
        norm_test_loss=point["norm_test_loss"],
        norm_train_err=point["norm_train_err"],
        norm_test_err=point["norm_test_err"],
        product_norm=point["product_norm"],
        rho=np.asarray(point["rho"], dtype=np.float64),
        norm_kind=point["norm_kind"], seeds=point["seeds"],
        epochs=point["epochs"], flagged=point["flagged"],
        normalized=normalized)


def _summarize(cfg, records, n_train):
    summary = {"schema": 1, "config": cfg.to_dict(), "n_train": n_train,
               "points": [_record_scalars(r) for r in records]}
    if len(records) >= 2:
        fit = linear_fit([(r.norm_train_loss, r.norm_test_loss)
                          for r in records])
        summary["normalized_fit"] = dataclasses.asdict(fit)
        br = bound_report(records, n_examples=n_train)
        summary["bound_report"] = {
            "gaps": br.gaps, "offset": br.offset, "c2_term": br.c2_term,
            "delta": br.delta, "n_examples": br.n_examples,
            "threshold": br.threshold, "tight": br.tight, "note": br.note,
        }
        capacity = spearmanr([r.product_norm for r in records],
                             [r.test_loss for r in records]).statistic
        summary["capacity_spearman"] = (None if np.isnan(capacity)
                                        else float(capacity))
        error_loss = spearmanr([r.norm_test_loss for r in records],
                               [r.test_err for r in records]).statistic
        summary["error_loss_spearman"] = (None if np.isnan(error_loss)
                                          else float(error_loss))
    return summary


def cmd_sweep(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    run_dir = Path(cfg.output_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    train, test = datasets_from_config(cfg)
    _echo(f"{cfg.protocol} on {cfg.architecture}: {len(train)} train / "
          f"{len(test)} test examples")

    plan = point_plan(cfg)
    records = [None] * len(plan)
    todo = []
    for task_idx, (kind, index, value) in enumerate(plan):
        if args.resume:
            record = _load_point(run_dir, task_idx)
            if record is not None:
                records[task_idx] = record
                _echo(f"  [{task_idx}] {kind}={value:g}: resumed from "
                      f"checkpoint")
                continue
        todo.append(task_idx)

    log_every = args.log_every if args.workers <= 1 else 0
    if args.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = {}
            for task_idx in todo:
                kind, index, value = plan[task_idx]
                futures[task_idx] = pool.submit(run_point, cfg, kind, index,
                                                value, train, test)
            for task_idx in todo:
                records[task_idx] = futures[task_idx].result()
                _write_point(run_dir, task_idx, records[task_idx])
                _echo(f"  [{task_idx}] done")
    else:
        for task_idx in todo:
            kind, index, value = plan[task_idx]
            _echo(f"  [{task_idx}] {kind}={value:g}: training...")
            records[task_idx] = run_point(cfg, kind, index, value, train,
                                          test, log_every)
            _write_point(run_dir, task_idx, records[task_idx])
            r = records[task_idx]
            _echo(f"  [{task_idx}] epoch {r.selected.epoch}: "
                  f"train {r.train_loss:.5f}/{r.train_err:.4f} "
                  f"test {r.test_loss:.5f}/{r.test_err:.4f}")

    table = ResultsTable.from_records(records)
    table.write(run_dir / "results.csv")
    summary = _summarize(cfg, records, len(train))
    (run_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, default=_jsonable), encoding="utf-8")
    _echo(f"wrote {run_dir / 'results.csv'} and {run_dir / 'summary.json'}")
    _emit(summary)
    return 0


# -------------------------------------------------------------- normalize

def _scale_identity_deviation(original, normalized, seed, n_inputs=20):
    """Max deviation of normalized*prod(rho) from original logits, in f64.

    The deviation is measured relative to the largest original logit
    magnitude per batch, which keeps near-zero logits from inflating it.
    """
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, 1.0, (n_inputs,) + original.input_shape)
    ref = forward(original.astype(np.float64), x, mode="eval")
    out = forward(normalized.net, x, mode="eval") * normalized.rho_product
    scale = max(float(np.max(np.abs(ref))), 1e-30)
    dev = float(np.max(np.abs(ref - out)) / scale)
    same_argmax = bool(np.all(ref.argmax(axis=1) == out.argmax(axis=1)))
    return dev, same_argmax


def cmd_normalize(args):
    net, meta = load_checkpoint(args.checkpoint)
    if "normalized" in meta:
        raise ValueError(f"{args.checkpoint} is already normalized "
                         f"({meta['normalized']})")
    kind = norm_kind_from_name(args.norm)
    result = {"input": args.checkpoint, "norm": kind.label}

    stack = net
    if any(layer.kind == "batchnorm" for layer in net.layers):
        stack = absorb_batchnorm(net)
        rng = np.random.default_rng(args.seed)
        x = rng.normal(0.0, 1.0, (20,) + net.input_shape)
        ref = forward(net.astype(np.float64), x, mode="eval")
        out = forward(stack, x, mode="eval")
        scale = max(float(np.max(np.abs(ref))), 1e-30)
        result["absorption_dev"] = float(np.max(np.abs(ref - out)) / scale)

    normalized = normalize_layerwise(stack, kind)
    dev, same_argmax = _scale_identity_deviation(stack, normalized, args.seed)
    result["scale_identity_dev"] = dev
    result["argmax_identical"] = same_argmax
    result["rho"] = [float(r) for r in normalized.rho]
    result["product_norm"] = normalized.rho_product

    out_path = Path(args.out) if args.out else \
        Path(args.checkpoint).with_suffix(".norm.ckpt")
    meta_out = dict(meta)
    meta_out["source_digest"] = file_digest(args.checkpoint)
    save_checkpoint(normalized, meta_out, out_path)
    result["output"] = str(out_path)
    _emit(result)
    return 0


# --------------------------------------------------------------- evaluate

def cmd_evaluate(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    net, meta = load_checkpoint(args.checkpoint)
    if "normalized" in meta:
        net = normalized_from_checkpoint(net, meta)
    train, test = datasets_from_config(cfg)
    result = {"checkpoint": args.checkpoint,
              "normalized": meta.get("normalized", "")}
    splits = ("train", "test") if args.split == "both" else (args.split,)
    for split in splits:
        ds = train if split == "train" else test
        rep = evaluate(net, ds, batch_size=cfg.eval_batch_size)
        result[split] = {"dataset_id": rep.dataset_id, "loss": rep.loss,
                         "error": rep.error, "n_examples": rep.n_examples}
    _emit(result)
    return 0


# -------------------------------------------------------------------- fit

def cmd_fit(args):
    table = ResultsTable.read(args.results)
    rows = None
    if args.rows:
        rows = [int(i) for i in args.rows.split(",")]
    points = table.points(args.x, args.y, rows=rows, kind=args.kind)
    fit = linear_fit(points)
    result = dataclasses.asdict(fit)
    result.update({"x": args.x, "y": args.y,
                   "rows": rows, "kind": args.kind})
    _emit(result)
    return 0


# ----------------------------------------------------------------- report

def cmd_report(args):
    run_dir = Path(args.run_dir)
    results_path = run_dir / "results.csv"
    summary_path = run_dir / "summary.json"
    if not results_path.exists() or not summary_path.exists():
        raise FileNotFoundError(
            f"{run_dir} is not a completed run directory "
            "(missing results.csv or summary.json)")
    table = ResultsTable.read(results_path)
    summary = json.loads(summary_path.read_text(encoding="utf-8"))

    plots_dir = run_dir / "plots"
    written = write_panels(table, plots_dir)

    # Histograms need weights and data: use the first point's checkpoints.
    ckpt_path, norm_path, _ = _point_paths(run_dir, 0)
    if not ckpt_path.exists() or not norm_path.exists():
        raise FileNotFoundError(f"missing point checkpoints under {run_dir}")
    net, _ = load_checkpoint(ckpt_path)
    normalized = normalized_from_checkpoint(*load_checkpoint(norm_path))
    cfg = config_from_dict(summary["config"])
    train, _ = datasets_from_config(cfg)
    hist_files, hist_stats = write_output_histograms(plots_dir, net,
                                                     normalized, train,
                                                     bins=args.bins)
    written.extend(hist_files)

    result = {"run_dir": str(run_dir),
              "files": [str(p) for p in written],
              "histogram_stats": hist_stats}
    _emit(result)
    return 0


# ------------------------------------------------------------ demo-linear

def cmd_demo_linear(args):
    rng = np.random.default_rng(args.seed)
    x = rng.normal(0.0, 1.0, (args.rows, args.cols))
    y = rng.choice([-1.0, 1.0], size=args.rows)
    report = min_norm_gd_demo(x, y, lr=args.lr, iterations=args.iterations)
    pinv_dev = float(np.max(np.abs(report.weights - np.linalg.pinv(x) @ y)))
    _emit({"rows": args.rows, "cols": args.cols, "seed": args.seed,
           "iterations": report.iterations,
           "weight_norm": report.weight_norm, "margin": report.margin,
           "final_loss": report.final_loss,
           "row_space_leak": report.row_space_leak,
           "pinv_deviation": pinv_dev})
    return 0


# ------------------------------------------------------------------ main

def build_parser():
    parser = argparse.ArgumentParser(
        prog="normlab",
        description="Train small nets, normalize their weights layer by "
                    "layer, and check how tightly training loss predicts "
                    "test loss.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("ingest", cmd_ingest, "load datasets and write a manifest")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--subset-size", type=int, default=None)

    p = add("sweep", cmd_sweep, "run the configured protocol end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the master seed")
    p.add_argument("--norm", choices=["fro", "l2", "l1", "linf"],
                   default=None, help="override the normalization kind")
    p.add_argument("--subset-size", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", action="store_true",
                   help="skip points whose checkpoints already verify")
    p.add_argument("--log-every", type=int, default=0,
                   help="print training progress every N epochs")

    p = add("normalize", cmd_normalize, "normalize a checkpoint layerwise")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--norm", choices=["fro", "l2", "l1", "linf"],
                   default="fro")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the equivalence-check inputs")

    p = add("evaluate", cmd_evaluate, "loss/error of a checkpoint on a "
                                      "configured dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--split", choices=["train", "test", "both"],
                   default="test")
    p.add_argument("--subset-size", type=int, default=None)

    p = add("fit", cmd_fit, "least-squares fit over results-table columns")
    p.add_argument("--results", required=True)
    p.add_argument("--x", default="norm_train_loss")
    p.add_argument("--y", default="norm_test_loss")
    p.add_argument("--rows", default=None,
                   help="comma-separated row indices to fit on")
    p.add_argument("--kind", default=None,
                   help="restrict to rows of this sweep kind")

    p = add("report", cmd_report, "emit plot-ready panel files for a run")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--bins", type=int, default=50)

    p = add("demo-linear", cmd_demo_linear,
            "minimum-norm gradient-descent demonstration")
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--cols", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--iterations", type=int, default=20000)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NormlabError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
