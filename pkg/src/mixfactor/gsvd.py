"""Generalized SVD of a real matrix under diagonal row/column metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SchemaError

DEFAULT_RANK_TOL = 1e-10


class DiagMetric:
    """Diagonal positive definite metric, stored as its weight vector."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        w = np.array(weights, dtype=float).ravel()
        if not np.all(np.isfinite(w)):
            raise SchemaError("metric weights must be finite")
        if np.any(w <= 0):
            raise SchemaError("metric weights must be strictly positive")
        w.setflags(write=False)
        self.weights = w

    def __len__(self):
        return self.weights.shape[0]

    def __repr__(self):
        return f"DiagMetric({self.weights!r})"

    @classmethod
    def uniform(cls, size: int, value: float = 1.0) -> "DiagMetric":
        return cls(np.full(size, float(value)))

    @property
    def sqrt(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def scaled(self, factor) -> "DiagMetric":
        return DiagMetric(self.weights * factor)


def as_metric(metric, size: int, name: str) -> DiagMetric:
    if not isinstance(metric, DiagMetric):
        metric = DiagMetric(metric)
    if len(metric) != size:
        raise SchemaError(
            f"metric {name} has length {len(metric)}, expected {size}"
        )
    return metric


@dataclass(frozen=True)
class GsvdResult:
    """Z = U diag(singular_values) V^t with U^t N U = I and V^t M V = I."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray
    rank: int

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.singular_values**2


def _check_matrix(Z) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise SchemaError(f"expected a 2-d matrix, got shape {Z.shape}")
    if not np.all(np.isfinite(Z)):
        raise SchemaError("matrix contains non-finite entries")
    return Z


def orient_signs(U: np.ndarray, V: np.ndarray):
    """Flip column pairs so the largest-magnitude entry of each V column is positive."""
    if V.shape[1] == 0:
        return U, V
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs


def gsvd(Z, N, M, rank_tol: float = DEFAULT_RANK_TOL) -> GsvdResult:
    """GSVD of ``Z`` with row metric ``N`` and column metric ``M``.

    Runs a standard SVD of N^{1/2} Z M^{1/2} and transforms the singular
    vectors back with N^{-1/2} and M^{-1/2}. Components whose singular value
    does not exceed ``rank_tol`` times the largest one are dropped.
    """
    Z = _check_matrix(Z)
    n, p = Z.shape
    N = as_metric(N, n, "N")
    M = as_metric(M, p, "M")
    if not rank_tol >= 0:
        raise SchemaError("rank_tol must be non-negative")

    n_sqrt, m_sqrt = N.sqrt, M.sqrt
    Z_tilde = n_sqrt[:, None] * Z * m_sqrt[None, :]
    U_t, s, Vt_t = np.linalg.svd(Z_tilde, full_matrices=False)

    # LAPACK returns nonincreasing values; stable sort keeps backend order on ties
    order = np.argsort(-s, kind="stable")
    s = s[order]
    U_t = U_t[:, order]
    V_t = Vt_t.T[:, order]

    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > rank_tol * s[0]))
    s = s[:rank]
    U = U_t[:, :rank] / n_sqrt[:, None]
    V = V_t[:, :rank] / m_sqrt[:, None]
    U, V = orient_signs(U, V)
    return GsvdResult(U=U, singular_values=s, V=V, rank=rank)


def tilde_factors(result: GsvdResult, N: DiagMetric, M: DiagMetric):
    """Recover the standard-SVD factors (U~, V~) from a metric GSVD."""
    return N.sqrt[:, None] * result.U, M.sqrt[:, None] * result.V


def row_scores(Z, M, V) -> np.ndarray:
    """F = Z M V: projections of the rows of Z on the axes spanned by V."""
    Z = _check_matrix(Z)
    V = np.asarray(V, dtype=float)
    M = as_metric(M, Z.shape[1], "M")
    if V.ndim != 2 or V.shape[0] != Z.shape[1]:
        raise SchemaError(f"V has shape {V.shape}, expected ({Z.shape[1]}, r)")
    return Z @ (M.weights[:, None] * V)


def col_scores(Z, N, U) -> np.ndarray:
    """A = Z^t N U: projections of the columns of Z on the axes spanned by U."""
    Z = _check_matrix(Z)
    U = np.asarray(U, dtype=float)
    N = as_metric(N, Z.shape[0], "N")
    if U.ndim != 2 or U.shape[0] != Z.shape[0]:
        raise SchemaError(f"U has shape {U.shape}, expected ({Z.shape[0]}, r)")
    return Z.T @ (N.weights[:, None] * U)
