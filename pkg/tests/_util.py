"""Random inputs and independent oracles shared by the test modules."""
import numpy as np

from mixfactor.preprocess import MixedTable


def random_mixed_table(rng, n=100, p1=3, p2=2, max_levels=4, min_levels=2):
    """Random table whose categorical variables observe every level at least twice."""
    cols = {}
    for j in range(p1):
        scale = rng.uniform(0.5, 20.0)
        cols[f"x{j + 1}"] = rng.normal(rng.uniform(-5, 5), scale, n)
    for j in range(p2):
        k = int(rng.integers(min_levels, max_levels + 1))
        codes = np.concatenate([np.repeat(np.arange(k), 2), rng.integers(0, k, n - 2 * k)])
        rng.shuffle(codes)
        cols[f"c{j + 1}"] = [f"c{j + 1}_{c}" for c in codes]
    return MixedTable(cols, row_ids=[f"r{i}" for i in range(n)])


def correlated_mixed_table(rng, n=120, p1=4, p2=3, levels=3, rho=0.7):
    """Mixed table with a shared latent factor so components are informative."""
    f = rng.standard_normal(n)
    cols = {}
    for j in range(p1):
        cols[f"x{j + 1}"] = np.sqrt(rho) * f + np.sqrt(1 - rho) * rng.standard_normal(n)
    for j in range(p2):
        z = np.sqrt(rho) * f + np.sqrt(1 - rho) * rng.standard_normal(n)
        cuts = np.quantile(z, np.linspace(0, 1, levels + 1)[1:-1])
        cols[f"c{j + 1}"] = [f"c{j + 1}_{c}" for c in np.searchsorted(cuts, z)]
    return MixedTable(cols, row_ids=[f"r{i}" for i in range(n)])


def align_signs(X, ref):
    """Flip the columns of X to best match ref."""
    s = np.sign((X * ref).sum(axis=0))
    s[s == 0] = 1.0
    return X * s


def eta2(y, labels):
    """Correlation ratio of y given the labels, by group means."""
    y = np.asarray(y, float)
    labels = np.asarray(labels, dtype=object)
    total = ((y - y.mean()) ** 2).sum()
    between = 0.0
    for lev in dict.fromkeys(labels):
        g = y[labels == lev]
        between += g.size * (g.mean() - y.mean()) ** 2
    return between / total


def r2(y, x):
    return np.corrcoef(y, x)[0, 1] ** 2


def varimax_value(A, col_var, p):
    """Dispersion of the per-variable squared loadings, summed over components."""
    C = np.zeros((p, A.shape[1]))
    for s, j in enumerate(col_var):
        C[j] += A[s] ** 2
    return float((p * (C**2).sum(axis=0) - C.sum(axis=0) ** 2).sum())


def random_rotation(rng, k):
    Q, R = np.linalg.qr(rng.standard_normal((k, k)))
    return Q * np.sign(np.diag(R))


def eigen_clusters(values, rtol=1e-8):
    """Index groups of (numerically) equal eigenvalues, in order."""
    values = np.asarray(values, float)
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    groups, start = [], 0
    for i in range(1, values.size + 1):
        if i == values.size or abs(values[i] - values[i - 1]) > rtol * scale:
            groups.append(np.arange(start, i))
            start = i
    return groups


def basis_gap(X, Y, values):
    """Max deviation between score matrices that are unique only up to basis.

    Columns with a simple eigenvalue are compared up to sign; inside a tied
    cluster any orthogonal mix is valid, so X X' and Y Y' are compared.
    """
    gap = 0.0
    for idx in eigen_clusters(values):
        x, y = X[:, idx], Y[:, idx]
        if idx.size == 1:
            gap = max(gap, float(np.abs(align_signs(x, y) - y).max()))
        else:
            gap = max(gap, float(np.abs(x @ x.T - y @ y.T).max()))
    return gap
