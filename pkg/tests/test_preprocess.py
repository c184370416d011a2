import numpy as np
import pytest

from mixfactor.errors import SchemaError, UnknownLevelError, ZeroVarianceError
from mixfactor.preprocess import (
    CATEGORICAL,
    NUMERIC,
    MixedTable,
    Schema,
    apply_preprocess,
    build_preprocessed,
    decode_indicator,
    indicator,
    raw_design,
    splitmix,
    standardize,
)


def small_table():
    return MixedTable(
        {
            "x": [1.0, 2.0, 3.0, 4.0],
            "c": ["a", "b", "a", "c"],
            "y": [2.0, 0.0, 1.0, 5.0],
        },
        row_ids=["r1", "r2", "r3", "r4"],
    )


def test_kind_inference_and_split():
    t = small_table()
    assert t.kinds == {"x": NUMERIC, "c": CATEGORICAL, "y": NUMERIC}
    num, cat = splitmix(t)
    assert num.names == ["x", "y"] and cat.names == ["c"]


def test_missing_cells_rejected():
    with pytest.raises(SchemaError):
        MixedTable({"x": [1.0, float("nan")]})
    with pytest.raises(SchemaError):
        MixedTable({"c": ["a", None]})
    with pytest.raises(SchemaError):
        MixedTable({"c": ["a", ""]})


def test_unequal_lengths_rejected():
    with pytest.raises(SchemaError):
        MixedTable({"x": [1.0, 2.0], "y": [1.0]})


def test_standardize_population_sd():
    Z, mean, sd = standardize(np.array([[1.0], [3.0]]))
    assert np.allclose(Z.ravel(), [-1.0, 1.0]) and sd[0] == 1.0 and mean[0] == 2.0


def test_zero_variance_names_variable():
    with pytest.raises(ZeroVarianceError, match="const"):
        build_preprocessed(MixedTable({"x": [1.0, 2.0, 3.0], "const": [5.0, 5.0, 5.0]}))


def test_indicator_first_appearance_order():
    G, counts, names, levels = indicator([["b"], ["a"], ["b"]], ["v"])
    assert levels == [("b", "a")] and names == ["b", "a"]
    assert np.array_equal(G, [[1, 0], [0, 1], [1, 0]]) and list(counts) == [2, 1]
    assert list(decode_indicator(G, levels)[:, 0]) == ["b", "a", "b"]


def test_level_collision_needs_rename():
    X = [["yes", "no"], ["no", "yes"]]
    with pytest.raises(SchemaError, match="renaming"):
        indicator(X, ["u", "v"])
    _, _, names, _ = indicator(X, ["u", "v"], rename=True)
    assert names == ["u=yes", "u=no", "v=no", "v=yes"]


def test_build_preprocessed_structure():
    prep = build_preprocessed(small_table())
    assert prep.Z.shape == (4, 5)
    assert np.allclose(prep.Z.mean(axis=0), 0.0)
    assert np.allclose(prep.N.weights, 0.25)
    assert np.allclose(prep.M.weights, [1, 1, 2, 4, 4])
    assert prep.total_inertia == 2 + 3 - 1
    assert prep.col_names == ("x", "y", "a", "b", "c")
    assert list(prep.col_var) == [0, 2, 1, 1, 1]


def test_single_level_variable_rejected():
    with pytest.raises(SchemaError, match="single observed level"):
        build_preprocessed(MixedTable({"x": [1.0, 2.0], "c": ["a", "a"]}))


def test_apply_preprocess_reproduces_training_z():
    t = small_table()
    prep = build_preprocessed(t)
    assert np.allclose(apply_preprocess(t, prep), prep.Z)
    one = t.take([2])
    assert np.allclose(apply_preprocess(one, prep), prep.Z[2:3])


def test_unseen_level_and_schema_errors():
    prep = build_preprocessed(small_table())
    new = MixedTable({"x": [1.0], "c": ["zzz"], "y": [1.0]})
    with pytest.raises(UnknownLevelError) as info:
        raw_design(new, prep)
    assert info.value.variable == "c" and info.value.level == "zzz"
    with pytest.raises(SchemaError, match="missing"):
        raw_design(MixedTable({"x": [1.0], "c": ["a"]}), prep)
    with pytest.raises(SchemaError, match="unexpected"):
        raw_design(MixedTable({"x": [1.0], "c": ["a"], "y": [1.0], "w": [2.0]}), prep)


def test_schema_round_trip():
    schema = build_preprocessed(small_table()).schema
    again = Schema.from_dict(schema.to_dict())
    assert again == schema
    assert again.categorical_names == ("c",)


def test_select_take_equals():
    t = small_table()
    assert t.select(["y", "x"]).names == ["y", "x"]
    assert t.take([0, 1]).n_rows == 2
    assert t.equals(small_table())
    assert not t.equals(t.take([0, 1, 2]))
