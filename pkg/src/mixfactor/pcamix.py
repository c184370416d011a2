"""PCA of mixed numerical/categorical data.

One GSVD of the preprocessed matrix Z under N = I/n and M = diag(1, n/n_s)
gives the factor model. On purely numeric data this is the standard PCA of
the correlation matrix; on purely categorical data it is MCA with
eigenvalues multiplied by the number of variables.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError, SchemaError
from .gsvd import DEFAULT_RANK_TOL, GsvdResult, gsvd
from .preprocess import (
    MixedTable,
    Preprocessed,
    build_preprocessed,
    indicator,
    raw_design,
)


def variable_membership(prep: Preprocessed) -> np.ndarray:
    """(p, p1+m) 0/1 matrix mapping Z columns to the variable owning them."""
    S = np.zeros((prep.n_vars, prep.col_var.shape[0]))
    S[prep.col_var, np.arange(prep.col_var.shape[0])] = 1.0
    return S


def weighted_sqsums(A: np.ndarray, weights: np.ndarray, prep: Preprocessed) -> np.ndarray:
    """Per-variable sums of weights[s] * A[s]^2 over the columns s it owns."""
    return variable_membership(prep) @ (weights[:, None] * A**2)


def squared_loadings(A: np.ndarray, prep: Preprocessed) -> np.ndarray:
    """Per-variable sum of M-weighted squared column scores.

    For a numeric variable this is r^2 with the component and for a
    categorical one the correlation ratio, whatever column metric produced A
    (as long as the row metric is I/n).
    """
    return weighted_sqsums(A, prep.M.weights, prep)


def linear_coefficients(W: np.ndarray, prep: Preprocessed) -> np.ndarray:
    """Coefficients of scores = Z W re-expressed on raw inputs X = (X1 | G).

    Row 0 holds the intercept, rows 1.. the slope of each column of X.
    """
    p1 = prep.p1
    slopes = W.copy()
    slopes[:p1] /= prep.sds[:, None]
    intercept = -(prep.column_means[:, None] * slopes).sum(axis=0)
    return np.vstack([intercept[None, :], slopes])


def apply_coefficients(beta: np.ndarray, X: np.ndarray) -> np.ndarray:
    return beta[0] + X @ beta[1:]


@dataclass(frozen=True)
class FactorModel:
    """Fitted PCAmix model truncated to ``ndim`` components.

    ``eigenvalues`` keeps all ``rank`` eigenvalues so that they add up to the
    total inertia; every other array has ``ndim`` columns.
    """

    prep: Preprocessed
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
    def singular_values(self) -> np.ndarray:
        return self.svd.singular_values[: self.ndim]

    @property
    def explained(self) -> np.ndarray:
        """(rank, 3) table: eigenvalue, percent, cumulative percent."""
        pct = 100.0 * self.eigenvalues / self.eigenvalues.sum()
        return np.column_stack([self.eigenvalues, pct, np.cumsum(pct)])


def _resolve_ndim(ndim, rank: int) -> int:
    if rank == 0:
        raise NumericalError("the preprocessed matrix has rank 0")
    if ndim is None or ndim == "all":
        return rank
    ndim = int(ndim)
    if ndim < 1:
        raise DimensionError(f"ndim must be at least 1, got {ndim}")
    if ndim > rank:
        raise DimensionError(f"ndim={ndim} exceeds the rank {rank}")
    return ndim


def fit_pcamix(
    table: MixedTable | Preprocessed,
    ndim: int | str | None = None,
    rename_level: bool = False,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> FactorModel:
    """Fit PCAmix; ``ndim=None`` keeps every component above the rank tolerance."""
    prep = table if isinstance(table, Preprocessed) else build_preprocessed(table, rename_level)
    res = gsvd(prep.Z, prep.N, prep.M, rank_tol=rank_tol)
    k = _resolve_ndim(ndim, res.rank)

    U = res.U[:, :k]
    V = res.V[:, :k]
    sv = res.singular_values[:k]
    F = U * sv
    A = V * sv
    A_star = prep.M.weights[:, None] * A
    contrib = squared_loadings(A, prep)
    return FactorModel(
        prep=prep,
        svd=res,
        ndim=k,
        eigenvalues=res.eigenvalues,
        U=U,
        V=V,
        F=F,
        A=A,
        A_star=A_star,
        sqload=contrib,
        contrib=contrib,
        contrib_pct=100.0 * contrib / sv**2,
        beta=linear_coefficients(prep.M.weights[:, None] * V, prep),
    )


def level_scores(model: FactorModel) -> np.ndarray:
    """Level rows of A*: the mean of the standardized scores U over each level."""
    return model.A_star[model.prep.p1 :]


def correlation_circle(model: FactorModel) -> np.ndarray:
    """Numeric rows of A*: correlations between the numeric variables and F."""
    return model.A_star[: model.prep.p1]


def predict_scores(model: FactorModel, new_table: MixedTable) -> np.ndarray:
    """Scores of new observations through the intercept/slope coefficients."""
    return apply_coefficients(model.beta, raw_design(new_table, model.prep))


@dataclass(frozen=True)
class CAResult:
    eigenvalues: np.ndarray
    row_scores: np.ndarray
    level_scores: np.ndarray
    V_L: np.ndarray
    V_C: np.ndarray
    col_masses: np.ndarray


def _sym_eig(S: np.ndarray, tol: float):
    S = 0.5 * (S + S.T)
    w, W = np.linalg.eigh(S)
    order = np.argsort(-w, kind="stable")
    w, W = w[order], W[:, order]
    keep = w > tol * max(w[0], 0.0) if w.size else np.zeros(0, bool)
    return w[keep], W[:, keep]


def ca_oracle(table: MixedTable, tol: float = 1e-10) -> CAResult:
    """Correspondence analysis of the indicator matrix via two separate PCAs.

    Row profiles L = G/p are analysed with metrics (D_r, D_c^-1) and column
    profiles C = G/(np) D_c^-1 with metrics (D_r^-1, D_c), both centered so
    the trivial axis is removed. Uses symmetric eigendecompositions rather
    than the GSVD path, so it can serve as an independent check of MCA.
    """
    if table.numeric_names:
        raise SchemaError("ca_oracle takes purely categorical tables")
    cats = table.categorical_names
    if not cats:
        raise SchemaError("table has no categorical variables")
    X2 = np.column_stack([table.column(c) for c in cats])
    G, counts, _, _ = indicator(X2, cats, rename=True)
    n, p = X2.shape

    r = np.full(n, 1.0 / n)
    c = counts / (n * p)
    L = G / p - c[None, :]
    C = G / (n * p) / c[None, :] - r[:, None]

    # rows: metric D_r on R^n, D_c^-1 on R^m
    dc_isqrt = 1.0 / np.sqrt(c)
    S_L = dc_isqrt[:, None] * (L.T @ (r[:, None] * L)) * dc_isqrt[None, :]
    mu, W_L = _sym_eig(S_L, tol)
    V_L = np.sqrt(c)[:, None] * W_L
    F = L @ (V_L / c[:, None])

    # columns: metric D_r^-1 on R^n, D_c on R^m
    dc_sqrt = np.sqrt(c)
    S_C = dc_sqrt[:, None] * (C.T @ (C / r[:, None])) * dc_sqrt[None, :]
    mu_c, W_C = _sym_eig(S_C, tol)
    V_C = W_C / dc_sqrt[:, None]
    k = min(mu.size, mu_c.size)
    A_star = V_C[:, :k] * np.sqrt(mu_c[:k])

    return CAResult(
        eigenvalues=mu[:k],
        row_scores=F[:, :k],
        level_scores=A_star,
        V_L=V_L[:, :k],
        V_C=V_C[:, :k],
        col_masses=c,
    )
