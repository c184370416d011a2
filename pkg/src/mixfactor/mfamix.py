"""Multiple factor analysis of groups of mixed variables.

Each group is first analysed on its own with PCAmix; every column of Z is
then weighted by the inverse of the first eigenvalue of its group and the
global GSVD runs with column metric M* = M P.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import SchemaError
from .gsvd import DEFAULT_RANK_TOL, DiagMetric, GsvdResult, gsvd
from .pcamix import (
    FactorModel,
    _resolve_ndim,
    apply_coefficients,
    fit_pcamix,
    linear_coefficients,
    squared_loadings,
    weighted_sqsums,
)
from .preprocess import MixedTable, Preprocessed, build_preprocessed, raw_design

DEFAULT_MFA_NDIM = 5


@dataclass(frozen=True)
class GroupStructure:
    names: tuple[str, ...]
    var_group: np.ndarray  # group index of each variable
    col_group: np.ndarray  # group index of each Z column
    lambda1: np.ndarray
    P: DiagMetric

    @property
    def n_groups(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class MfamixModel:
    prep: Preprocessed
    groups: GroupStructure
    separate: tuple[FactorModel, ...]
    M_star: DiagMetric
    svd: GsvdResult
    ndim: int
    eigenvalues: np.ndarray
    U: np.ndarray
    V: np.ndarray
    F: np.ndarray
    A: np.ndarray
    A_star: np.ndarray
    sqload: np.ndarray
    contrib: np.ndarray
    contrib_pct: np.ndarray
    beta: np.ndarray

    @property
    def rank(self) -> int:
        return self.svd.rank

    @property
    def explained(self) -> np.ndarray:
        pct = 100.0 * self.eigenvalues / self.eigenvalues.sum()
        return np.column_stack([self.eigenvalues, pct, np.cumsum(pct)])


def _group_indices(prep: Preprocessed, group_map: Mapping[str, str]):
    unknown = [v for v in group_map if v not in prep.variables]
    if unknown:
        raise SchemaError(f"unknown variables in group map: {', '.join(map(str, unknown))}")
    missing = [v for v in prep.variables if v not in group_map]
    if missing:
        raise SchemaError(f"variables without a group: {', '.join(missing)}")
    names = tuple(dict.fromkeys(str(group_map[v]) for v in group_map))
    pos = {g: i for i, g in enumerate(names)}
    var_group = np.array([pos[str(group_map[v])] for v in prep.variables], dtype=np.intp)
    for i, g in enumerate(names):
        if not np.any(var_group == i):
            raise SchemaError(f"group {g} is empty")
    return names, var_group


def fit_mfamix(
    table: MixedTable,
    group_map: Mapping[str, str],
    ndim: int | str | None = None,
    rename_level: bool = False,
    rank_tol: float = DEFAULT_RANK_TOL,
    max_workers: int | None = None,
) -> MfamixModel:
    """Fit MFAmix. ``group_map`` maps every variable to a group name.

    Groups are ordered by first appearance in ``group_map``. ``ndim=None``
    keeps min(5, rank) components; ``"all"`` keeps every component.
    """
    prep = build_preprocessed(table, rename_level)
    names, var_group = _group_indices(prep, group_map)
    G = len(names)

    def fit_group(g):
        cols = [v for v, gi in zip(prep.variables, var_group) if gi == g]
        return fit_pcamix(table.select(cols), rename_level=rename_level, rank_tol=rank_tol)

    if max_workers == 1 or G == 1:
        separate = tuple(fit_group(g) for g in range(G))
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            separate = tuple(pool.map(fit_group, range(G)))

    lambda1 = np.array([m.eigenvalues[0] for m in separate])
    col_group = var_group[prep.col_var]
    P = DiagMetric(1.0 / lambda1[col_group])
    M_star = DiagMetric(prep.M.weights * P.weights)

    res = gsvd(prep.Z, prep.N, M_star, rank_tol=rank_tol)
    if ndim is None:
        ndim = min(DEFAULT_MFA_NDIM, res.rank)
    k = _resolve_ndim(ndim, res.rank)
    U = res.U[:, :k]
    V = res.V[:, :k]
    sv = res.singular_values[:k]
    A = V * sv
    contrib = weighted_sqsums(A, M_star.weights, prep)
    groups = GroupStructure(
        names=names, var_group=var_group, col_group=col_group, lambda1=lambda1, P=P
    )
    return MfamixModel(
        prep=prep,
        groups=groups,
        separate=separate,
        M_star=M_star,
        svd=res,
        ndim=k,
        eigenvalues=res.eigenvalues,
        U=U,
        V=V,
        F=U * sv,
        A=A,
        A_star=prep.M.weights[:, None] * A,
        sqload=squared_loadings(A, prep),
        contrib=contrib,
        contrib_pct=100.0 * contrib / sv**2,
        beta=linear_coefficients(M_star.weights[:, None] * V, prep),
    )


def group_contributions(model: MfamixModel) -> np.ndarray:
    """(G, ndim) sums of the variable contributions within each group."""
    G = model.groups.n_groups
    out = np.zeros((G, model.ndim))
    np.add.at(out, model.groups.var_group, model.contrib)
    return out


def partial_observations(model: MfamixModel) -> np.ndarray:
    """(G, n, ndim) scores of each group's partial observations.

    The rows of Z with every column outside group g set to zero are projected
    with M* and scaled by the number of groups, so their mean over groups is
    the global score.
    """
    G = model.groups.n_groups
    Z = model.prep.Z
    W = model.M_star.weights[:, None] * model.V
    out = np.empty((G, Z.shape[0], model.ndim))
    for g in range(G):
        mask = model.groups.col_group == g
        out[g] = G * (Z[:, mask] @ W[mask])
    return out


def _weighted_corr(x: np.ndarray, y: np.ndarray):
    """Pearson correlations between the columns of x and y (uniform weights).

    Returns (corr, degenerate) where degenerate flags constant columns of x
    or y; their correlations are reported as 0.
    """
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    sx = np.sqrt((xc**2).mean(axis=0))
    sy = np.sqrt((yc**2).mean(axis=0))
    cov = xc.T @ yc / x.shape[0]
    eps = 1e-12
    bad_x = sx <= eps * max(1.0, float(np.abs(x).max(initial=0.0)))
    bad_y = sy <= eps * max(1.0, float(np.abs(y).max(initial=0.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = cov / np.outer(sx, sy)
    degenerate = bad_x[:, None] | bad_y[None, :]
    corr[degenerate] = 0.0
    return np.clip(corr, -1.0, 1.0), degenerate


def partial_axes(model: MfamixModel, with_flags: bool = False):
    """Correlations of each group's separate components with the global ones.

    Returns a list with one (rank_g, ndim) matrix per group, every component
    of the separate analyses included. With ``with_flags`` also returns the
    matching boolean masks of undefined (constant-component) entries.
    """
    mats, flags = [], []
    for sep in model.separate:
        corr, bad = _weighted_corr(sep.svd.U * sep.svd.singular_values, model.F)
        mats.append(corr)
        flags.append(bad)
    return (mats, flags) if with_flags else mats


def predict_mfamix(model: MfamixModel, new_table: MixedTable) -> np.ndarray:
    """Global MFAmix scores of new observations through the coefficients."""
    return apply_coefficients(model.beta, raw_design(new_table, model.prep))
