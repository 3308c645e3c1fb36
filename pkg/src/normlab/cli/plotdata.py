"""Plot-ready two-column text files for each results panel."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from normlab.analysis.bounds import psi_transform
from normlab.analysis.curves import error_vs_loss_curve
from normlab.analysis.fits import linear_fit
from normlab.analysis.histogram import output_histogram

PSI_GRID_POINTS = 101


def write_xy(path, xs, ys):
    """Two space-separated columns, 9 significant digits, one pair per line."""
    lines = [f"{float(x):.9g} {float(y):.9g}" for x, y in zip(xs, ys)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def write_histogram(path, hist):
    """Bin centers against counts."""
    centers = (hist.bin_edges[:-1] + hist.bin_edges[1:]) / 2.0
    return write_xy(path, centers, hist.counts)


def write_panels(table, out_dir):
    """Emit every panel derivable from the results table alone.

    Returns the list of files written.  Panels that need a fitted line or
    a curve require at least two rows; with fewer the raw scatter panels
    are still produced.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def xy_panel(name, xcol, ycol):
        xs, ys = table.column(xcol), table.column(ycol)
        written.append(write_xy(out_dir / name, xs, ys))

    xy_panel("unnormalized_loss.txt", "train_loss", "test_loss")
    xy_panel("product_norm.txt", "product_norm", "test_loss")
    xy_panel("normalized_loss.txt", "norm_train_loss", "norm_test_loss")

    if len(table) >= 2:
        points = table.points("norm_train_loss", "norm_test_loss")
        fit = linear_fit(points)
        xs = np.linspace(min(x for x, _ in points), max(x for x, _ in points),
                         PSI_GRID_POINTS)
        written.append(write_xy(out_dir / "normalized_fit.txt", xs,
                                fit.predict(xs)))
        curve = error_vs_loss_curve(
            table.points("norm_test_loss", "test_err"))
        written.append(write_xy(out_dir / "error_vs_loss.txt",
                                curve.points[:, 0], curve.points[:, 1]))

    grid = np.linspace(0.0, 1.0, PSI_GRID_POINTS)
    written.append(write_xy(out_dir / "psi_curve.txt", grid,
                            psi_transform(grid)))
    return written


def write_output_histograms(out_dir, net, normalized, dataset, bins=50):
    """Max-class output histograms for a raw and a normalized network."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    raw = output_histogram(net, dataset, bins=bins)
    norm = output_histogram(normalized, dataset, bins=bins)
    files = [write_histogram(out_dir / "hist_unnormalized.txt", raw),
             write_histogram(out_dir / "hist_normalized.txt", norm)]
    stats = {
        "unnormalized": {"mean": raw.mean, "std": raw.std},
        "normalized": {"mean": norm.mean, "std": norm.std},
    }
    return files, stats
