"""numpy implementation of the planar varimax kernel (fallback backend)."""
import math

import numpy as np

# g^2 + h^2 below this: criterion locally flat, no rotation
DEGENERATE = 1e-24


def planar_angle(A, l, t, col_var, p):
    al = A[:, l]
    at = A[:, t]
    alpha = np.bincount(col_var, weights=al * al - at * at, minlength=p)
    beta = 2.0 * np.bincount(col_var, weights=al * at, minlength=p)
    sa = alpha.sum()
    sb = beta.sum()
    g = 2.0 * p * (alpha @ beta) - 2.0 * sa * sb
    h = p * (alpha @ alpha - beta @ beta) - sa * sa + sb * sb
    d = g * g + h * h
    if d < DEGENERATE:
        return 0.0
    psi = math.acos(min(1.0, max(-1.0, h / math.sqrt(d))))
    if g < 0:
        psi = -psi
    return psi / 4.0


def sweep(A, T, col_var, p):
    """One pass over all planes (l, t), l < t; rotates A and T in place.

    Returns the largest absolute angle applied.
    """
    k = A.shape[1]
    max_theta = 0.0
    for l in range(k - 1):
        for t in range(l + 1, k):
            theta = planar_angle(A, l, t, col_var, p)
            max_theta = max(max_theta, abs(theta))
            if theta == 0.0:
                continue
            c, s = math.cos(theta), math.sin(theta)
            for X in (A, T):
                xl = X[:, l].copy()
                xt = X[:, t]
                X[:, l] = c * xl + s * xt
                X[:, t] = c * xt - s * xl
    return max_theta


def criterion(A, col_var, p):
    """sum_i [p * sum_j c_ji^2 - (sum_j c_ji)^2] with c_ji the per-variable squared loading."""
    C = np.zeros((p, A.shape[1]))
    np.add.at(C, col_var, A * A)
    return float((p * (C * C).sum(axis=0) - C.sum(axis=0) ** 2).sum())
