"""Mixed tables and the centering/scaling step shared by all analyses.

A mixed table is split into numeric columns X1 and categorical columns X2.
The analysed matrix is Z = [Z1, Z2] where Z1 is X1 standardized with the
population standard deviation and Z2 is the indicator matrix of X2 centered
by the level frequencies. Rows get weight 1/n, numeric columns weight 1 and
the indicator column of a level with count n_s gets weight n/n_s.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import SchemaError, UnknownLevelError, ZeroVarianceError
from .gsvd import DiagMetric

NUMERIC = "numeric"
CATEGORICAL = "categorical"
_KINDS = (NUMERIC, CATEGORICAL)


def _is_number(value) -> bool:
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(
        value, (bool, np.bool_)
    )


class MixedTable:
    """Observations x variables, each variable numeric or categorical.

    Numeric columns are stored as float arrays and categorical columns as
    object arrays of ``str`` labels. Missing cells (None, NaN, empty string)
    are rejected.
    """

    def __init__(
        self,
        columns: Mapping[str, Sequence],
        kinds: Mapping[str, str] | None = None,
        row_ids: Sequence | None = None,
        n_rows: int | None = None,
    ):
        kinds = dict(kinds or {})
        unknown = set(kinds) - set(columns)
        if unknown:
            raise SchemaError(f"kinds given for unknown columns: {sorted(unknown)}")

        self._names: list[str] = []
        self._kinds: dict[str, str] = {}
        self._data: dict[str, np.ndarray] = {}
        lengths = set()
        for name, values in columns.items():
            name = str(name)
            values = list(values)
            lengths.add(len(values))
            kind = kinds.get(name)
            if kind is None:
                kind = NUMERIC if values and all(_is_number(v) for v in values) else CATEGORICAL
            if kind not in _KINDS:
                raise SchemaError(f"unknown kind {kind!r} for column {name}")
            self._names.append(name)
            self._kinds[name] = kind
            self._data[name] = self._coerce(name, kind, values)

        if len(lengths) > 1:
            raise SchemaError(f"columns have different lengths: {sorted(lengths)}")
        if lengths:
            n = lengths.pop()
            if n_rows is not None and n_rows != n:
                raise SchemaError(f"n_rows={n_rows} but columns have length {n}")
        elif n_rows is not None:
            n = int(n_rows)
        else:
            raise SchemaError("an empty table needs an explicit n_rows")
        self.n_rows = n

        if row_ids is None:
            row_ids = [str(i + 1) for i in range(n)]
        row_ids = [str(r) for r in row_ids]
        if len(row_ids) != n:
            raise SchemaError(f"{len(row_ids)} row ids for {n} rows")
        self.row_ids = tuple(row_ids)

    @staticmethod
    def _coerce(name: str, kind: str, values: list) -> np.ndarray:
        if kind == NUMERIC:
            try:
                arr = np.array(values, dtype=float)
            except (TypeError, ValueError):
                raise SchemaError(f"column {name} is declared numeric but has non-numeric cells")
            if not np.all(np.isfinite(arr)):
                raise SchemaError(f"column {name} has missing or non-finite cells")
            return arr
        labels = []
        for v in values:
            if v is None or (isinstance(v, float) and np.isnan(v)):
                raise SchemaError(f"column {name} has missing cells")
            s = str(v)
            if s == "":
                raise SchemaError(f"column {name} has empty cells")
            labels.append(s)
        arr = np.empty(len(labels), dtype=object)
        arr[:] = labels
        return arr

    @property
    def names(self) -> list[str]:
        return list(self._names)

    @property
    def kinds(self) -> dict[str, str]:
        return dict(self._kinds)

    @property
    def n_cols(self) -> int:
        return len(self._names)

    def kind(self, name: str) -> str:
        return self._kinds[name]

    def column(self, name: str) -> np.ndarray:
        return self._data[name]

    def __contains__(self, name) -> bool:
        return name in self._data

    def __repr__(self):
        return f"MixedTable(n_rows={self.n_rows}, columns={self._kinds})"

    def select(self, names: Sequence[str]) -> "MixedTable":
        missing = [c for c in names if c not in self._data]
        if missing:
            raise SchemaError(f"unknown columns: {missing}")
        return MixedTable(
            {c: self._data[c] for c in names},
            kinds={c: self._kinds[c] for c in names},
            row_ids=self.row_ids,
            n_rows=self.n_rows,
        )

    def take(self, rows) -> "MixedTable":
        idx = np.arange(self.n_rows)[np.asarray(rows)]
        return MixedTable(
            {c: self._data[c][idx] for c in self._names},
            kinds=self._kinds,
            row_ids=[self.row_ids[i] for i in idx],
            n_rows=idx.size,
        )

    def numeric_matrix(self, names: Sequence[str] | None = None) -> np.ndarray:
        names = self.numeric_names if names is None else names
        if not names:
            return np.zeros((self.n_rows, 0))
        return np.column_stack([self._data[c] for c in names])

    @property
    def numeric_names(self) -> list[str]:
        return [c for c in self._names if self._kinds[c] == NUMERIC]

    @property
    def categorical_names(self) -> list[str]:
        return [c for c in self._names if self._kinds[c] == CATEGORICAL]

    def equals(self, other: "MixedTable") -> bool:
        if self._names != other._names or self._kinds != other._kinds:
            return False
        if self.row_ids != other.row_ids:
            return False
        return all(np.array_equal(self._data[c], other._data[c]) for c in self._names)


def splitmix(table: MixedTable) -> tuple[MixedTable, MixedTable]:
    """Split into (numeric part, categorical part), keeping column order."""
    return table.select(table.numeric_names), table.select(table.categorical_names)


def standardize(X1, names: Sequence[str] | None = None):
    """Center and scale columns to mean 0 and population variance 1.

    Returns ``(Z1, means, sds)``. Raises :class:`ZeroVarianceError` naming the
    first constant column.
    """
    X1 = np.asarray(X1, dtype=float)
    if X1.ndim == 1:
        X1 = X1[:, None]
    means = X1.mean(axis=0)
    sds = X1.std(axis=0)
    scale = np.maximum(np.abs(X1).max(axis=0, initial=0.0), 1.0)
    for j in np.flatnonzero(sds <= 1e-14 * scale):
        raise ZeroVarianceError(names[j] if names is not None else f"#{j + 1}")
    return (X1 - means) / sds, means, sds


def level_label(variable: str, level: str, rename: bool) -> str:
    return f"{variable}={level}" if rename else level


def indicator(X2, names: Sequence[str] | None = None, rename: bool = False):
    """0/1 indicator coding of categorical columns.

    ``X2`` is an (n, p2) array-like of labels. Levels are ordered by first
    appearance within each variable and the blocks follow variable order.
    Returns ``(G, level_counts, level_names, levels)`` where ``levels`` lists
    the raw labels of each variable.
    """
    X2 = np.asarray(X2, dtype=object)
    if X2.ndim == 1:
        X2 = X2[:, None]
    n, p2 = X2.shape
    if names is None:
        names = [f"V{j + 1}" for j in range(p2)]

    blocks, levels = [], []
    for j in range(p2):
        col = [str(v) for v in X2[:, j]]
        order = list(dict.fromkeys(col))
        pos = {lev: i for i, lev in enumerate(order)}
        block = np.zeros((n, len(order)))
        block[np.arange(n), [pos[v] for v in col]] = 1.0
        blocks.append(block)
        levels.append(tuple(order))

    G = np.hstack(blocks) if blocks else np.zeros((n, 0))
    level_names = [level_label(names[j], lev, rename) for j in range(p2) for lev in levels[j]]
    if len(set(level_names)) != len(level_names):
        seen, dup = set(), []
        for name in level_names:
            if name in seen:
                dup.append(name)
            seen.add(name)
        raise SchemaError(
            f"level labels shared by several variables: {sorted(set(dup))}; "
            "enable level renaming to disambiguate them as variable=level"
        )
    return G, G.sum(axis=0), level_names, levels


def decode_indicator(G, levels: Sequence[Sequence[str]]) -> np.ndarray:
    """Inverse of :func:`indicator`: recover labels from the 0/1 blocks."""
    G = np.asarray(G)
    out = np.empty((G.shape[0], len(levels)), dtype=object)
    start = 0
    for j, levs in enumerate(levels):
        block = G[:, start : start + len(levs)]
        out[:, j] = [levs[k] for k in np.argmax(block, axis=1)]
        start += len(levs)
    return out


@dataclass(frozen=True)
class Schema:
    """Variables, kinds and training levels; enough to code new rows as (X1 | G)."""

    variables: tuple[str, ...]
    kinds: tuple[str, ...]
    levels: dict

    @property
    def numeric_names(self) -> tuple[str, ...]:
        return tuple(v for v, k in zip(self.variables, self.kinds) if k == NUMERIC)

    @property
    def categorical_names(self) -> tuple[str, ...]:
        return tuple(v for v, k in zip(self.variables, self.kinds) if k == CATEGORICAL)

    def to_dict(self) -> dict:
        out = []
        for v, k in zip(self.variables, self.kinds):
            entry = {"name": v, "kind": k}
            if k == CATEGORICAL:
                entry["levels"] = list(self.levels[v])
            out.append(entry)
        return {"variables": out}

    @classmethod
    def from_dict(cls, d: dict) -> "Schema":
        vs = d["variables"]
        return cls(
            variables=tuple(v["name"] for v in vs),
            kinds=tuple(v["kind"] for v in vs),
            levels={v["name"]: tuple(v["levels"]) for v in vs if v["kind"] == CATEGORICAL},
        )


@dataclass(frozen=True)
class Preprocessed:
    """Everything needed to rebuild Z, its metrics, and to project new rows."""

    Z: np.ndarray
    N: DiagMetric
    M: DiagMetric
    variables: tuple[str, ...]
    kinds: tuple[str, ...]
    numeric_names: tuple[str, ...]
    categorical_names: tuple[str, ...]
    means: np.ndarray
    sds: np.ndarray
    levels: dict
    level_counts: np.ndarray
    level_names: tuple[str, ...]
    col_names: tuple[str, ...]
    col_var: np.ndarray
    var_index: tuple[np.ndarray, ...]
    rename_level: bool
    row_ids: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    @property
    def p1(self) -> int:
        return len(self.numeric_names)

    @property
    def p2(self) -> int:
        return len(self.categorical_names)

    @property
    def m(self) -> int:
        return self.level_counts.shape[0]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def total_inertia(self) -> float:
        return float(self.p1 + self.m - self.p2)

    @property
    def schema(self) -> Schema:
        return Schema(self.variables, self.kinds, self.levels)

    @property
    def column_means(self) -> np.ndarray:
        """Raw-scale means of the columns of (X1 | G)."""
        return np.concatenate([self.means, self.level_counts / self.n])


def build_preprocessed(table: MixedTable, rename_level: bool = False) -> Preprocessed:
    """Build Z = [Z1, Z2] and the metrics N = I/n, M = diag(1,...,1, n/n_s)."""
    if table.n_cols == 0:
        raise SchemaError("table has no variables")
    n = table.n_rows
    if n < 2:
        raise SchemaError("at least two observations are required")
    num = table.numeric_names
    cat = table.categorical_names

    Z1, means, sds = standardize(table.numeric_matrix(num), num)
    if cat:
        X2 = np.column_stack([table.column(c) for c in cat])
    else:
        X2 = np.empty((n, 0), dtype=object)
    G, counts, level_names, levs = indicator(X2, cat, rename=rename_level)
    for name, lv in zip(cat, levs):
        if len(lv) < 2:
            raise SchemaError(f"categorical variable {name} has a single observed level")
    Z2 = G - counts / n
    Z = np.hstack([Z1, Z2])

    col_var_name = list(num) + [c for c, lv in zip(cat, levs) for _ in lv]
    var_pos = {v: j for j, v in enumerate(table.names)}
    col_var = np.array([var_pos[v] for v in col_var_name], dtype=np.intp)
    var_index = tuple(np.flatnonzero(col_var == j) for j in range(table.n_cols))

    col_var.setflags(write=False)
    for a in (Z, means, sds, counts):
        a.setflags(write=False)
    return Preprocessed(
        Z=Z,
        N=DiagMetric.uniform(n, 1.0 / n),
        M=DiagMetric(np.concatenate([np.ones(len(num)), n / counts])),
        variables=tuple(table.names),
        kinds=tuple(table.kind(c) for c in table.names),
        numeric_names=tuple(num),
        categorical_names=tuple(cat),
        means=means,
        sds=sds,
        levels=dict(zip(cat, levs)),
        level_counts=counts,
        level_names=tuple(level_names),
        col_names=tuple(num) + tuple(level_names),
        col_var=col_var,
        var_index=var_index,
        rename_level=rename_level,
        row_ids=table.row_ids,
    )


def _check_schema(table: MixedTable, fitted: Schema | Preprocessed) -> None:
    missing = [v for v in fitted.variables if v not in table]
    if missing:
        raise SchemaError(f"missing variables: {', '.join(missing)}")
    extra = [v for v in table.names if v not in fitted.variables]
    if extra:
        raise SchemaError(f"unexpected variables: {', '.join(extra)}")
    for v, kind in zip(fitted.variables, fitted.kinds):
        if table.kind(v) != kind:
            raise SchemaError(f"variable {v} is {table.kind(v)}, was {kind} in training")


def raw_design(table: MixedTable, fitted: Schema | Preprocessed) -> np.ndarray:
    """X = (X1 | G) for a new table, coded with the training levels."""
    _check_schema(table, fitted)
    n = table.n_rows
    X1 = table.numeric_matrix(list(fitted.numeric_names))
    blocks = []
    for v in fitted.categorical_names:
        levs = fitted.levels[v]
        pos = {lev: i for i, lev in enumerate(levs)}
        block = np.zeros((n, len(levs)))
        for i, lab in enumerate(table.column(v)):
            k = pos.get(lab)
            if k is None:
                raise UnknownLevelError(v, lab)
            block[i, k] = 1.0
        blocks.append(block)
    return np.hstack([X1] + blocks)


def apply_preprocess(table: MixedTable, fitted: Preprocessed) -> np.ndarray:
    """Transform new rows with the training means, sds and level frequencies."""
    X = raw_design(table, fitted)
    p1 = fitted.p1
    Z = X - fitted.column_means
    Z[:, :p1] /= fitted.sds
    return Z
