import numpy as np
import pytest

from mixfactor.errors import SchemaError
from mixfactor.io import fmt, ingest_csv, read_groups, read_matrix, write_matrix


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_detection_rules(tmp_path):
    t = ingest_csv(write(tmp_path, "n,c,m\n1.5,a,1\n2,b,2\n3e1,a,x\n"))
    assert t.kinds == {"n": "numeric", "c": "categorical", "m": "categorical"}
    assert list(t.column("n")) == [1.5, 2.0, 30.0]
    assert list(t.column("m")) == ["1", "2", "x"]


def test_overrides_and_id_column(tmp_path):
    p = write(tmp_path, "id,code,v\nr1,1,0.5\nr2,2,1.5\n")
    t = ingest_csv(p, {"code": "cat"}, id_col="id")
    assert t.row_ids == ("r1", "r2") and t.kind("code") == "categorical"
    with pytest.raises(SchemaError):
        ingest_csv(p, {"code": "bogus"})
    with pytest.raises(SchemaError):
        ingest_csv(p, {"id": "num"})
    with pytest.raises(SchemaError):
        ingest_csv(p, {"nope": "num"})


@pytest.mark.parametrize("text,msg", [
    ("a,b\n1,2\n3\n", "cells"),
    ("a,b\n1,\n3,4\n", "empty cell"),
    ("a,a\n1,2\n", "duplicate"),
])
def test_malformed_csv(tmp_path, text, msg):
    with pytest.raises(SchemaError, match=msg):
        ingest_csv(write(tmp_path, text))


def test_groups_file(tmp_path):
    assert read_groups(write(tmp_path, "variable,group\nx,g1\ny,g2\n")) == {"x": "g1", "y": "g2"}
    assert read_groups(write(tmp_path, "x,g1\n")) == {"x": "g1"}
    with pytest.raises(SchemaError):
        read_groups(write(tmp_path, "x,g1\nx,g2\n"))


def test_matrix_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((7, 3)) * 10.0 ** rng.integers(-12, 12, (7, 3))
    p = tmp_path / "m.csv"
    write_matrix(p, X, [f"r{i}" for i in range(7)], ["a", "b", "c"])
    Y, rows, cols = read_matrix(p)
    assert np.array_equal(X, Y) and cols == ["a", "b", "c"] and rows[0] == "r0"
    assert fmt(0.1) == "0.1" and float(fmt(1 / 3)) == 1 / 3
