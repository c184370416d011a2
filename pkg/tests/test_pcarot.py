import numpy as np
import pytest

from _util import correlated_mixed_table, random_rotation, varimax_value
from mixfactor import _kernels
from mixfactor.errors import DimensionError
from mixfactor.gsvd import tilde_factors
from mixfactor.pcamix import fit_pcamix
from mixfactor.pcarot import (
    planar_angle,
    predict_rotated,
    rotate,
    rotated_sqload,
    varimax_criterion,
)
from mixfactor.preprocess import MixedTable


@pytest.fixture(scope="module")
def model():
    return fit_pcamix(correlated_mixed_table(np.random.default_rng(3), n=150, p1=4, p2=3))


def test_k_out_of_range(model):
    with pytest.raises(DimensionError):
        rotate(model, 1)
    with pytest.raises(DimensionError):
        rotate(model, model.rank + 1)


def test_rotation_identities(model):
    res = rotate(model, 3)
    assert res.converged and res.sweeps >= 1
    assert np.allclose(res.T.T @ res.T, np.eye(3), atol=1e-12)
    # rotated scores keep their orthogonality, each with variance lambda_rot
    assert np.allclose(res.F_rot.T @ res.F_rot / model.prep.n, np.diag(res.lambda_rot), atol=1e-10)
    # standardized rotated scores are the rotated standardized scores
    assert np.allclose(res.F_rot / np.sqrt(res.lambda_rot), model.U[:, :3] @ res.T, atol=1e-10)
    assert np.allclose(rotated_sqload(res).sum(axis=0), res.lambda_rot)
    assert np.isclose(res.lambda_rot.sum(), model.eigenvalues[:3].sum())
    assert np.isclose(varimax_criterion(res.A_tilde_rot, model.prep.col_var), res.criterion_history[-1])


def test_rotated_prediction_of_subset(model):
    res = rotate(model, 2)
    table = correlated_mixed_table(np.random.default_rng(3), n=150, p1=4, p2=3)
    rows = [0, 5, 7]
    assert np.allclose(predict_rotated(res, table.take(rows)), res.F_rot[rows], atol=1e-10)


def test_planar_criterion_closed_form(model):
    """The planar objective is const + (h cos 4t + g sin 4t)/2, maximized at the returned angle."""
    prep = model.prep
    _, Vt = tilde_factors(model.svd, prep.N, prep.M)
    A = np.ascontiguousarray(Vt[:, :2] * model.svd.singular_values[:2])
    theta = planar_angle(A, 0, 1, prep.col_var)

    def value(t):
        c, s = np.cos(t), np.sin(t)
        B = np.column_stack([c * A[:, 0] + s * A[:, 1], c * A[:, 1] - s * A[:, 0]])
        return varimax_value(B, prep.col_var, prep.n_vars)

    ts = np.linspace(-np.pi / 4, np.pi / 4, 9)
    vals = np.array([value(t) for t in ts])
    design = np.column_stack([np.ones_like(ts), np.cos(4 * ts), np.sin(4 * ts)])
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    assert np.allclose(design @ coef, vals, atol=1e-9)
    assert np.isclose(np.arctan2(coef[2], coef[1]) / 4, theta, atol=1e-9)
    assert value(theta) >= vals.max() - 1e-12


def test_simple_structure_gives_identity():
    # exactly orthogonal Hadamard columns: block A spans h1/h2, block B h3/h4;
    # the two leading components each load one block only
    H = np.array([[1, 1, 1, 1, 1, 1, 1, 1],
                  [1, -1, 1, -1, 1, -1, 1, -1],
                  [1, 1, -1, -1, 1, 1, -1, -1],
                  [1, -1, -1, 1, 1, -1, -1, 1],
                  [1, 1, 1, 1, -1, -1, -1, -1]], float).T
    a, b = 1 / 3, 1 / 2  # within-block correlations 0.8 and 0.6
    t = MixedTable({
        "a1": H[:, 1] + a * H[:, 2], "a2": H[:, 1] - a * H[:, 2],
        "b1": H[:, 3] + b * H[:, 4], "b2": H[:, 3] - b * H[:, 4],
    })
    m = fit_pcamix(t)
    assert np.allclose(m.eigenvalues, [1.8, 1.6, 0.4, 0.2])
    res = rotate(m, 2)
    assert np.allclose(res.T, np.eye(2), atol=1e-10)
    assert np.allclose(res.lambda_rot, [1.8, 1.6])


def test_max_sweeps_reported(model):
    res = rotate(model, 3, max_sweeps=1, angle_tol=0.0)
    assert res.sweeps == 1 and not res.converged


def test_final_criterion_beats_random_rotations(model):
    rng = np.random.default_rng(9)
    res = rotate(model, 3)
    prep = model.prep
    _, Vt = tilde_factors(model.svd, prep.N, prep.M)
    A0 = Vt[:, :3] * model.svd.singular_values[:3]
    best = res.criterion_history[-1]
    for _ in range(500):
        assert varimax_value(A0 @ random_rotation(rng, 3), prep.col_var, prep.n_vars) <= best + 1e-10


@pytest.mark.skipif("cython" not in _kernels.BACKENDS, reason="compiled kernel not built")
def test_backends_agree(model):
    py = rotate(model, 4, backend="python")
    cy = rotate(model, 4, backend="cython")
    assert py.sweeps == cy.sweeps
    assert np.allclose(py.T, cy.T, atol=1e-12)
    assert np.allclose(py.F_rot, cy.F_rot, atol=1e-10)
    assert cy.backend == "cython" and py.backend == "python"
