"""The results table: one CSV row per sweep point.

Numeric values are snapped to 9 significant digits on entry, so emitting
and re-parsing a table reproduces it exactly while keeping RMSE-scale
differences (around 1e-5) representable.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

from normlab.errors import FormatError

SCHEMA_VERSION = 1
SCHEMA_LINE = f"# results-schema {SCHEMA_VERSION}"

COLUMNS = ("sweep_kind", "sweep_value", "seed", "epochs", "train_loss",
           "train_err", "test_loss", "test_err", "norm_kind",
           "norm_train_loss", "norm_test_loss", "norm_train_err",
           "norm_test_err", "product_norm", "selected_epoch")
_STR_COLUMNS = {"sweep_kind", "norm_kind"}
_INT_COLUMNS = {"seed", "epochs", "selected_epoch"}
_FLOAT_COLUMNS = set(COLUMNS) - _STR_COLUMNS - _INT_COLUMNS


def sig9(value):
    """Round a float to 9 significant decimal digits."""
    return float(f"{float(value):.9g}")


def _normalize_row(row):
    out = {}
    for col in COLUMNS:
        if col not in row:
            raise ValueError(f"row is missing column {col!r}")
        v = row[col]
        if col in _STR_COLUMNS:
            out[col] = str(v)
        elif col in _INT_COLUMNS:
            out[col] = int(v)
        else:
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"column {col!r} is not finite: {v}")
            out[col] = sig9(v)
    extra = set(row) - set(COLUMNS)
    if extra:
        raise ValueError(f"unknown columns {sorted(extra)}")
    return out


@dataclass
class ResultsTable:
    """An ordered list of per-point rows under the fixed column schema."""

    rows: list

    def __post_init__(self):
        self.rows = [_normalize_row(r) for r in self.rows]

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, ResultsTable) and self.rows == other.rows

    @classmethod
    def from_records(cls, records):
        """Build the table from RunRecords, in the order given."""
        rows = []
        for rec in records:
            rows.append({
                "sweep_kind": rec.sweep_kind,
                "sweep_value": rec.sweep_value,
                "seed": rec.seeds["init"],
                "epochs": rec.epochs,
                "train_loss": rec.train_loss,
                "train_err": rec.train_err,
                "test_loss": rec.test_loss,
                "test_err": rec.test_err,
                "norm_kind": rec.norm_kind,
                "norm_train_loss": rec.norm_train_loss,
                "norm_test_loss": rec.norm_test_loss,
                "norm_train_err": rec.norm_train_err,
                "norm_test_err": rec.norm_test_err,
                "product_norm": rec.product_norm,
                "selected_epoch": rec.selected.epoch,
            })
        return cls(rows)

    def column(self, name):
        if name not in COLUMNS:
            raise ValueError(f"unknown column {name!r}")
        return [row[name] for row in self.rows]

    def points(self, x, y, rows=None, kind=None):
        """(x, y) pairs from two columns, optionally restricted.

        ``rows`` selects by index; ``kind`` filters on sweep_kind.  Both
        together apply the index selection first.
        """
        selected = self.rows if rows is None else [self.rows[i] for i in rows]
        if kind is not None:
            selected = [r for r in selected if r["sweep_kind"] == kind]
        return [(r[x], r[y]) for r in selected]

    def emit(self):
        """Serialize to CSV text (with the schema version line first)."""
        buf = io.StringIO()
        buf.write(SCHEMA_LINE + "\n")
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        out_rows = []
        for row in self.rows:
            printable = {}
            for col, v in row.items():
                printable[col] = f"{v:.9g}" if col in _FLOAT_COLUMNS else str(v)
            out_rows.append(printable)
        writer.writerows(out_rows)
        return buf.getvalue()

    def write(self, path):
        Path(path).write_text(self.emit(), encoding="utf-8")

    @classmethod
    def parse(cls, text):
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# results-schema"):
            raise FormatError("results table is missing its schema line")
        if lines[0] != SCHEMA_LINE:
            raise FormatError(
                f"unsupported results schema {lines[0]!r}; "
                f"this build reads {SCHEMA_LINE!r}")
        reader = csv.DictReader(io.StringIO("\n".join(lines[1:])))
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise FormatError("results table columns do not match the schema")
        return cls([dict(row) for row in reader])

    @classmethod
    def read(cls, path):
        return cls.parse(Path(path).read_text(encoding="utf-8"))
