"""CSV ingestion and result writers.

Floats are written with ``repr``, the shortest decimal string that parses
back to the same double, so re-reading a result file is exact and repeated
runs produce identical bytes.
"""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import SchemaError
from .preprocess import CATEGORICAL, NUMERIC, MixedTable

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

KIND_ALIASES = {
    "num": NUMERIC,
    "numeric": NUMERIC,
    "cat": CATEGORICAL,
    "categorical": CATEGORICAL,
}


def is_decimal(cell: str) -> bool:
    return bool(_DECIMAL.match(cell))


def fmt(x) -> str:
    return repr(float(x))


def ingest_csv(
    path,
    type_overrides: Mapping[str, str] | None = None,
    id_col: str | None = None,
) -> MixedTable:
    """Read a UTF-8 CSV with a header row into a :class:`MixedTable`.

    A column is numeric iff every cell is a decimal number; ``type_overrides``
    maps column names to ``num``/``cat`` to force a kind. ``id_col`` names a
    column holding row identifiers.
    """
    overrides = {}
    for col, kind in (type_overrides or {}).items():
        if kind not in KIND_ALIASES:
            raise SchemaError(f"unknown type {kind!r} for column {col}; use num or cat")
        overrides[col] = KIND_ALIASES[kind]

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if len(set(header)) != len(header):
        dup = sorted({h for h in header if header.count(h) > 1})
        raise SchemaError(f"{path}: duplicate headers: {', '.join(dup)}")
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise SchemaError(f"{path}: line {i} has {len(row)} cells, expected {len(header)}")

    cols = {h: [row[j].strip() for row in body] for j, h in enumerate(header)}
    for h, cells in cols.items():
        for i, c in enumerate(cells, start=2):
            if c == "":
                raise SchemaError(f"{path}: empty cell in column {h} at line {i}")

    unknown = set(overrides) - set(header)
    if unknown:
        raise SchemaError(f"type given for unknown columns: {', '.join(sorted(unknown))}")

    row_ids = None
    if id_col is not None:
        if id_col not in cols:
            raise SchemaError(f"{path}: no id column {id_col}")
        row_ids = cols.pop(id_col)

    columns, kinds = {}, {}
    for h, cells in cols.items():
        kind = overrides.get(h)
        if kind is None:
            kind = NUMERIC if cells and all(is_decimal(c) for c in cells) else CATEGORICAL
        if kind == NUMERIC:
            bad = [c for c in cells if not is_decimal(c)]
            if bad:
                raise SchemaError(f"column {h} forced numeric but has cell {bad[0]!r}")
            columns[h] = [float(c) for c in cells]
        else:
            columns[h] = cells
        kinds[h] = kind
    return MixedTable(columns, kinds=kinds, row_ids=row_ids, n_rows=len(body))


def read_groups(path) -> dict:
    """Two-column CSV ``variable,group``; an exact header row is skipped."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and [c.strip().lower() for c in rows[0]] == ["variable", "group"]:
        rows = rows[1:]
    groups = {}
    for i, row in enumerate(rows, start=1):
        if len(row) != 2:
            raise SchemaError(f"{path}: row {i} should have 2 cells (variable,group)")
        var, grp = row[0].strip(), row[1].strip()
        if var in groups:
            raise SchemaError(f"{path}: variable {var} listed twice")
        groups[var] = grp
    return groups


def write_groups(path, group_map: Mapping[str, str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["variable", "group"])
        for var, grp in group_map.items():
            w.writerow([var, grp])


def write_table(path, table: MixedTable, id_col: str = "id") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([id_col] + table.names)
        cols = [table.column(c) for c in table.names]
        numeric = [table.kind(c) == NUMERIC for c in table.names]
        for i, rid in enumerate(table.row_ids):
            w.writerow([rid] + [fmt(col[i]) if isnum else col[i] for col, isnum in zip(cols, numeric)])


def write_matrix(
    path,
    values: np.ndarray,
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    corner: str = "",
) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape != (len(row_labels), len(col_labels)):
        raise ValueError(f"shape {values.shape} vs {len(row_labels)}x{len(col_labels)} labels")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([corner] + list(col_labels))
        for lab, row in zip(row_labels, values):
            w.writerow([lab] + [fmt(x) for x in row])


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(c) if isinstance(c, (float, np.floating)) else c for c in row])


def read_matrix(path):
    """Inverse of :func:`write_matrix`: ``(values, row_labels, col_labels)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    cols = rows[0][1:]
    labels = [r[0] for r in rows[1:]]
    values = np.array([[float(c) for c in r[1:]] for r in rows[1:]]).reshape(len(labels), len(cols))
    return values, labels, cols


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
