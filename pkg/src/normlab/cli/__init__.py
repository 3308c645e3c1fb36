"""Command-line interface, results tables, and plot-ready panel files."""

from normlab.cli.main import build_parser, main
from normlab.cli.plotdata import (
    write_histogram,
    write_output_histograms,
    write_panels,
    write_xy,
)
from normlab.cli.results import COLUMNS, SCHEMA_LINE, ResultsTable, sig9

__all__ = [
    "COLUMNS",
    "SCHEMA_LINE",
    "ResultsTable",
    "build_parser",
    "main",
    "sig9",
    "write_histogram",
    "write_output_histograms",
    "write_panels",
    "write_xy",
]
