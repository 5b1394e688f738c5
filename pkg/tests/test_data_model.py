import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact.data_model import (
    AttributeSchema,
    Codebook,
    Dataset,
    MeasurementType,
    ValidationError,
    allowed_ops,
    guard,
    guard_rule,
    load_csv,
    schema_from_document,
)
from artifact.rule_engine import Clause, Rule

from conftest import make_dataset


def test_codebook_codes_must_be_dense_from_one():
    Codebook({"a": 1, "b": 2, "c": 3})
    with pytest.raises(ValidationError):
        Codebook({"a": 1, "b": 3})
    with pytest.raises(ValidationError):
        Codebook({"a": 0, "b": 1})
    with pytest.raises(ValidationError):
        Codebook({"a": 1, "b": 1})


def test_codebook_round_trip():
    cb = Codebook({"x": 1, "y": 2})
    assert cb.encode("x") == 1
    assert cb.decode(2) == "y"
    assert cb.size == 2
    with pytest.raises(ValidationError):
        cb.encode("z")


def test_measurement_kinds_and_ops():
    assert "leq" in allowed_ops(MeasurementType("ordinal"))
    assert "leq" not in allowed_ops(MeasurementType("nominal"))
    assert "ratio" in allowed_ops(MeasurementType("ratio"))
    assert allowed_ops(MeasurementType("absolute")) == allowed_ops(MeasurementType("ratio"))
    with pytest.raises(ValidationError):
        MeasurementType("sideways")


def test_dataset_rejects_misordered_indices():
    cb = Codebook({"a": 1})
    attrs = [AttributeSchema(name="x1", index=2, codebook=cb)]
    with pytest.raises(ValidationError):
        Dataset(attrs, [np.array([1])], np.array([1]), {1: "C1"})


def test_dataset_rejects_ragged_columns():
    with pytest.raises(ValidationError):
        make_dataset([[1, 2], [1, 2, 3]], [1, 2])


def test_column_and_class_accessors(toy):
    assert toy.n_cases == 12
    assert toy.n_attributes == 2
    assert toy.class_ids == (1, 2)
    assert toy.class_count(1) == 5
    assert list(toy.column(1)[:3]) == [1, 1, 1]
    assert toy.values_present(1) == (1, 2, 3, 4)
    with pytest.raises(ValidationError):
        toy.column(0)


def test_subset_preserves_schema_and_order(toy):
    sub = toy.subset([3, 0, 5])
    assert sub.n_cases == 3
    assert list(sub.column(1)) == [3, 1, 2]
    assert sub.schema(1).name == toy.schema(1).name


def test_schema_document_round_trip(toy):
    doc = toy.schema_document()
    attrs, class_names = schema_from_document(doc)
    assert [a.name for a in attrs] == ["x1", "x2"]
    assert class_names == {1: "C1", 2: "C2"}
    assert attrs[0].codebook.raw_to_code == toy.schema(1).codebook.raw_to_code


def test_fingerprint_changes_with_data(toy):
    same = toy.subset(list(range(toy.n_cases)))
    assert toy.fingerprint() == same.fingerprint()
    assert toy.fingerprint() != toy.subset([0, 1, 2]).fingerprint()


def test_load_csv(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("yes,red,small\nno,blue,big\nyes,red,big\n")
    ds = load_csv(p, class_column=1)
    assert ds.n_cases == 3
    assert ds.n_attributes == 2
    assert sorted(ds.class_names.values()) == ["no", "yes"]
    # first-appearance coding
    assert ds.schema(1).codebook.encode("red") == 1
    assert ds.schema(1).codebook.encode("blue") == 2


def test_guard_blocks_order_on_nominal(toy):
    nominal = toy.schema(1)
    eq = Clause(1, "include", frozenset({1}))
    assert guard(eq, nominal).ok
    bad = guard(("leq", 1), nominal)
    assert not bad.ok
    assert bad.violations


def test_guard_rule_checks_every_clause(toy):
    rule = Rule((Clause(1, "include", frozenset({1, 3})),), 1)
    assert guard_rule(rule, toy).ok
    with pytest.raises(ValidationError):
        guard_rule(Rule((Clause(9, "include", frozenset({1})),), 1), toy)


@given(st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=40))
def test_subset_of_full_range_is_identity(codes):
    ds = make_dataset([codes], [1 + (c % 2) for c in codes])
    sub = ds.subset(np.arange(ds.n_cases))
    assert ds.fingerprint() == sub.fingerprint()
