import json
import re

import numpy as np
import pytest

from mixfactor.cli import main
from mixfactor.io import read_matrix

CIRCLE = re.compile(r'<circle class="(\w+)" data-x="([^"]+)" data-y="([^"]+)" data-label="([^"]*)"')


def points(path):
    return [(cls, float(x), float(y), lab) for cls, x, y, lab in CIRCLE.findall(path.read_text())]


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out", str(d / "data.csv"), "--groups", str(d / "groups.csv"), "--n", "200"]) == 0
    return d


def test_pure_numeric_inertia(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((30, 3))
    lines = ["a,b,c"] + [",".join(repr(float(v)) for v in row) for row in X]
    (tmp_path / "d.csv").write_text("\n".join(lines) + "\n")
    assert main(["pcamix", "--data", str(tmp_path / "d.csv"), "--out", str(tmp_path / "o")]) == 0
    eig, _, cols = read_matrix(tmp_path / "o" / "eigenvalues.csv")
    assert cols == ["eigenvalue", "percent", "cumulative"]
    assert abs(eig[:, 0].sum() - 3.0) < 1e-8


def test_pcamix_outputs_and_predict(synth, tmp_path):
    out = tmp_path / "o"
    args = ["pcamix", "--data", str(synth / "data.csv"), "--id-col", "id", "--ndim", "4", "--out", str(out)]
    assert main(args) == 0
    for name in ("eigenvalues", "ind_coord", "levels_coord", "quanti_coord", "sqload",
                 "contrib", "contrib_pct", "coef"):
        assert (out / f"{name}.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["ndim"] == 4 and summary["config"]["command"] == "pcamix"
    assert main(["predict", "--model", str(out), "--data", str(synth / "data.csv"), "--out", str(tmp_path / "p")]) == 0
    F, ids, _ = read_matrix(out / "ind_coord.csv")
    S, ids2, _ = read_matrix(tmp_path / "p" / "scores.csv")
    assert ids == ids2 and np.abs(F - S).max() < 1e-8


def test_pcarot_outputs(synth, tmp_path):
    out = tmp_path / "o"
    assert main(["pcarot", "--data", str(synth / "data.csv"), "--id-col", "id", "--k", "3", "--out", str(out)]) == 0
    T, _, _ = read_matrix(out / "T.csv")
    assert np.allclose(T.T @ T, np.eye(3))
    eig, _, _ = read_matrix(out / "eigenvalues.csv")
    rot, _, _ = read_matrix(out / "rot_eigenvalues.csv")
    assert np.isclose(rot[:, 0].sum(), eig[:3, 0].sum())
    summary = json.loads((out / "summary.json").read_text())
    assert summary["converged"] and summary["sweeps"] >= 1
    assert main(["predict", "--model", str(out), "--data", str(synth / "data.csv"), "--out", str(tmp_path / "p")]) == 0
    F, _, _ = read_matrix(out / "rot_ind_coord.csv")
    S, _, _ = read_matrix(tmp_path / "p" / "scores.csv")
    assert np.abs(F - S).max() < 1e-8


def test_mfamix_and_plots(synth, tmp_path):
    out = tmp_path / "o"
    args = ["mfamix", "--data", str(synth / "data.csv"), "--groups", str(synth / "groups.csv"),
            "--id-col", "id", "--out", str(out), "--plots", "--color-by", "houses"]
    assert main(args) == 0
    for name in ("groups_contrib", "partial_ind", "partial_axes", "eig_separate"):
        assert (out / f"{name}.csv").exists()

    for _, x, y, _ in points(out / "cor.svg"):
        assert x * x + y * y <= 1 + 1e-9
    eig, _, _ = read_matrix(out / "eigenvalues.csv")
    for _, x, y, _ in points(out / "sqload.svg"):
        assert 0 <= x <= eig[:, 0].max() and 0 <= y <= eig[:, 0].max()
    F, ids, _ = read_matrix(out / "ind_coord.csv")
    pts = points(out / "partial.svg")
    centers = [p for p in pts if p[0] == "center"]
    assert centers
    for _, x, y, lab in centers:
        i = ids.index(lab)
        assert (x, y) == (F[i, 0], F[i, 1])
    partial = [p for p in pts if p[0] == "partial"]
    assert np.isclose(np.mean([p[1] for p in partial]), centers[0][1])
    assert 'class="unit-circle"' in (out / "axes.svg").read_text()
    ind = points(out / "ind.svg")
    assert len(ind) == 200 and 'data-group="houses_1"' in (out / "ind.svg").read_text()


def test_golden_determinism(synth, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["mfamix", "--data", str(synth / "data.csv"), "--groups", str(synth / "groups.csv"),
                     "--id-col", "id", "--ndim", "3", "--out", str(out), "--plots"]) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files == sorted(p.name for p in outs[1].iterdir())
    for f in files:
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes(), f


def test_ind_coord_round_trip_exact(tmp_path):
    from mixfactor.io import ingest_csv
    from mixfactor.pcamix import fit_pcamix

    data = tmp_path / "d.csv"
    assert main(["synth", "--out", str(data), "--n", "100"]) == 0
    assert main(["pcamix", "--data", str(data), "--id-col", "id", "--out", str(tmp_path / "o")]) == 0
    F, _, _ = read_matrix(tmp_path / "o" / "ind_coord.csv")
    model = fit_pcamix(ingest_csv(data, id_col="id"))
    assert np.array_equal(F, model.F)


def test_error_exit_codes(synth, tmp_path, capsys):
    data, groups = synth / "data.csv", synth / "groups.csv"
    lines = groups.read_text().splitlines()
    partial = tmp_path / "g.csv"
    partial.write_text("\n".join(l for l in lines if not l.startswith("council,")) + "\n")
    assert main(["mfamix", "--data", str(data), "--groups", str(partial), "--id-col", "id", "--out", str(tmp_path / "o")]) == 2
    assert "council" in capsys.readouterr().err

    assert main(["pcamix", "--data", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")]) == 1
    assert main(["pcarot", "--data", str(data), "--id-col", "id", "--k", "1", "--out", str(tmp_path / "o")]) == 2
    assert main(["pcarot", "--data", str(data), "--id-col", "id", "--k", "4", "--ndim", "3", "--out", str(tmp_path / "o")]) == 2
    assert main(["pcamix", "--data", str(data), "--id-col", "id", "--plots", "--axes", "1,99", "--out", str(tmp_path / "o")]) == 2
    assert main(["pcamix", "--bogus"]) == 2

    zero = tmp_path / "z.csv"
    zero.write_text("a,b,c\n1,x,2\n2,y,2\n3,x,2\n")
    assert main(["pcamix", "--data", str(zero), "--out", str(tmp_path / "o")]) == 2
    assert "zero variance" in capsys.readouterr().err

    train = tmp_path / "t.csv"
    train.write_text("a,b\n1,x\n2,y\n3,x\n")
    assert main(["pcamix", "--data", str(train), "--out", str(tmp_path / "m")]) == 0
    new = tmp_path / "n.csv"
    new.write_text("a,b\n1,q\n")
    assert main(["predict", "--model", str(tmp_path / "m"), "--data", str(new), "--out", str(tmp_path / "p")]) == 2
    assert "unseen level" in capsys.readouterr().err
