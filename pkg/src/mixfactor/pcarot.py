"""Varimax-type orthogonal rotation of PCAmix components.

The first k columns of the loadings A~ = V~ Lambda~ of the standard SVD of
N^{1/2} Z M^{1/2} are rotated plane by plane. For a plane (l, t) the optimal
angle has a closed form in terms of per-variable sums over the rows of A~
owned by each variable (a single row for a numeric variable, one row per
level for a categorical one), so numeric and categorical variables enter the
criterion through r^2 and the correlation ratio respectively.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionError
from .gsvd import tilde_factors
from .pcamix import FactorModel, apply_coefficients, linear_coefficients
from .preprocess import MixedTable, raw_design

DEFAULT_ANGLE_TOL = 1e-8
DEFAULT_MAX_SWEEPS = 100


@dataclass(frozen=True)
class RotationResult:
    model: FactorModel
    k: int
    T: np.ndarray
    A_tilde_rot: np.ndarray
    U_tilde_rot: np.ndarray
    lambda_rot: np.ndarray
    F_rot: np.ndarray
    A_star_rot: np.ndarray
    V_rot: np.ndarray
    beta_rot: np.ndarray
    sweeps: int
    converged: bool
    criterion_history: tuple = field(default_factory=tuple)
    angle_history: tuple = field(default_factory=tuple)  # max |theta| per sweep
    backend: str = "python"

    @property
    def prep(self):
        return self.model.prep

    @property
    def explained(self) -> np.ndarray:
        total = self.model.eigenvalues.sum()
        pct = 100.0 * self.lambda_rot / total
        return np.column_stack([self.lambda_rot, pct, np.cumsum(pct)])


def _col_var(prep) -> np.ndarray:
    return np.ascontiguousarray(prep.col_var, dtype=np.intp)


def planar_angle(A_tilde_rot, l: int, t: int, col_var, backend: str | None = None) -> float:
    """Angle theta in [-pi/4, pi/4] maximizing the varimax criterion in plane (l, t).

    ``col_var`` maps each row of ``A_tilde_rot`` to its variable.
    """
    if l == t:
        raise DimensionError("planar_angle needs two distinct columns")
    A = np.ascontiguousarray(A_tilde_rot, dtype=float)
    if not (0 <= l < A.shape[1] and 0 <= t < A.shape[1]):
        raise DimensionError(f"columns ({l}, {t}) out of range for {A.shape[1]} components")
    cv = np.ascontiguousarray(col_var, dtype=np.intp)
    p = int(cv.max()) + 1 if cv.size else 0
    return float(_kernels.get_backend(backend).planar_angle(A, l, t, cv, p))


def varimax_criterion(A_tilde, col_var) -> float:
    """Sum over components of p^2 times the variance of the per-variable squared loadings."""
    A = np.ascontiguousarray(A_tilde, dtype=float)
    cv = np.ascontiguousarray(col_var, dtype=np.intp)
    return float(_kernels.get_backend("python").criterion(A, cv, int(cv.max()) + 1))


def rotate(
    model: FactorModel,
    k: int,
    angle_tol: float = DEFAULT_ANGLE_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    backend: str | None = None,
) -> RotationResult:
    """Rotate the first ``k`` components of a PCAmix model."""
    if k < 2 or k > model.rank:
        raise DimensionError(f"k must be between 2 and the rank {model.rank}, got {k}")
    backend = backend or _kernels.BACKEND
    kern = _kernels.get_backend(backend)
    prep = model.prep
    res = model.svd
    U_t, V_t = tilde_factors(res, prep.N, prep.M)
    U_t, V_t = U_t[:, :k], V_t[:, :k]
    sv = res.singular_values[:k]

    A = np.ascontiguousarray(V_t * sv)
    T = np.eye(k)
    cv = _col_var(prep)
    p = prep.n_vars

    history = [float(kern.criterion(A, cv, p))]
    angles = []
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        max_theta = kern.sweep(A, T, cv, p)
        sweeps += 1
        angles.append(float(max_theta))
        history.append(float(kern.criterion(A, cv, p)))
        if max_theta < angle_tol:
            converged = True
            break

    U_rot = U_t @ T
    lam = (A**2).sum(axis=0)
    sd = np.sqrt(lam)
    F_rot = U_rot * sd / prep.N.sqrt[:, None]
    m_sqrt = prep.M.sqrt[:, None]
    V_rot = m_sqrt * (V_t / sv) @ T * sd
    return RotationResult(
        model=model,
        k=k,
        T=T,
        A_tilde_rot=A,
        U_tilde_rot=U_rot,
        lambda_rot=lam,
        F_rot=F_rot,
        A_star_rot=m_sqrt * A,
        V_rot=V_rot,
        beta_rot=linear_coefficients(V_rot, prep),
        sweeps=sweeps,
        converged=converged,
        criterion_history=tuple(history),
        angle_history=tuple(angles),
        backend=backend,
    )


def rotated_sqload(result: RotationResult) -> np.ndarray:
    """Per-variable sums of squared rotated tilde loadings (r^2 or eta^2)."""
    prep = result.prep
    C = np.zeros((prep.n_vars, result.k))
    np.add.at(C, prep.col_var, result.A_tilde_rot**2)
    return C


def predict_rotated(result: RotationResult, new_table: MixedTable) -> np.ndarray:
    """Rotated scores of new observations through the rotated coefficients."""
    return apply_coefficients(result.beta_rot, raw_design(new_table, result.prep))
