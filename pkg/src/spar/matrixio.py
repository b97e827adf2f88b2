"""Reading and writing matrices, target vectors and adaptation reports.

Matrix files are comma-separated text with one sample per row and an
optional single header line. Reports are JSON; floats are written with
Python's shortest round-trip repr, so reloading reproduces every weight
bit for bit.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from spar.adapt import AdaptationReport, SelectionSet
from spar.riskmodel import EigenLedger


class MatrixFormatError(ValueError):
    """Malformed matrix or target file."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class EmptyInputError(MatrixFormatError):
    pass


class CellParseError(MatrixFormatError):
    pass


class RaggedRowError(MatrixFormatError):
    pass


def _read_rows(path, has_header):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        lines = list(csv.reader(fh))
    rows = []
    start = 1 if has_header else 0
    for lineno, cells in enumerate(lines[start:], start=start + 1):
        if not cells or all(not c.strip() for c in cells):
            continue
        rows.append((lineno, cells))
    if not rows:
        raise EmptyInputError("no data rows", path=path)
    return path, rows


def _parse_cell(text, path, lineno, col):
    try:
        value = float(text)
    except ValueError:
        raise CellParseError(f"cannot parse {text!r} as a number", path, lineno, col) from None
    if not math.isfinite(value):
        raise CellParseError(f"non-finite value {text!r}", path, lineno, col)
    return value


def load_matrix(path, has_header=False):
    """Load an ``N x D`` float matrix from a CSV file."""
    path, rows = _read_rows(path, has_header)
    width = len(rows[0][1])
    values = []
    for lineno, cells in rows:
        if len(cells) != width:
            raise RaggedRowError(
                f"expected {width} columns, found {len(cells)}", path, lineno
            )
        values.append([_parse_cell(c, path, lineno, k + 1) for k, c in enumerate(cells)])
    return np.array(values, dtype=float)


def load_targets(path, has_header=False):
    """Load a single-column target vector."""
    path, rows = _read_rows(path, has_header)
    values = []
    for lineno, cells in rows:
        if len(cells) != 1:
            raise MatrixFormatError(
                f"target file must have one column, found {len(cells)}", path, lineno
            )
        values.append(_parse_cell(cells[0], path, lineno, 1))
    return np.array(values, dtype=float)


def write_matrix(path, m, header=None):
    """Write a matrix (or a vector, as one column) at 17 significant digits."""
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        for row in m:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def report_to_dict(report):
    return {
        "alpha": float(report.alpha),
        "sigma2_hat": float(report.sigma2_hat),
        "weights_ols": [float(v) for v in report.weights_ols],
        "weights_spar": [float(v) for v in report.weights_spar],
        "selected_indices": list(report.selected_indices),
        "ledger": report.ledger.records(),
        "selected_vectors": [[float(v) for v in row] for row in report.selection.vectors],
        "source_rank": int(report.source_rank),
        "rank_deficient": bool(report.rank_deficient),
    }


def report_from_dict(data):
    ledger_rows = data["ledger"]
    ledger = EigenLedger(
        lambda_z_sq=np.array([r["lambda_z_sq"] for r in ledger_rows], dtype=float),
        var_zj=np.array([r["var_zj"] for r in ledger_rows], dtype=float),
        selected=np.array([r["selected"] for r in ledger_rows], dtype=bool),
        bias_hat_zj=np.array([r["bias_hat_zj"] for r in ledger_rows], dtype=float),
    )
    d = len(data["weights_ols"])
    vectors = np.array(data.get("selected_vectors", []), dtype=float).reshape(-1, d)
    selection = SelectionSet(indices=tuple(int(j) for j in data["selected_indices"]), vectors=vectors)
    rank = int(data.get("source_rank", d))
    return AdaptationReport(
        alpha=float(data["alpha"]),
        sigma2_hat=float(data["sigma2_hat"]),
        weights_ols=np.array(data["weights_ols"], dtype=float),
        weights_spar=np.array(data["weights_spar"], dtype=float),
        selection=selection,
        ledger=ledger,
        source_rank=rank,
        rank_deficient=bool(data.get("rank_deficient", rank < d)),
    )


def dumps_report(report):
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def save_report(report, path):
    Path(path).write_text(dumps_report(report), encoding="utf-8")


def load_report(path):
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
