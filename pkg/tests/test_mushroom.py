from itertools import combinations

import numpy as np
import pytest

from artifact.data_model import ValidationError
from artifact.mushroom import code_of, load_mushroom, mushroom_schema

from conftest import DATA


def test_counts(mushroom):
    assert mushroom.n_cases == 8124
    assert mushroom.n_attributes == 22
    assert mushroom.class_count(1) == 3916
    assert mushroom.class_count(2) == 4208
    assert mushroom.class_names == {1: "poisonous", 2: "edible"}


def test_codes_follow_documentation_order(mushroom):
    assert code_of("odor", "f") == 5
    assert code_of("odor", "n") == 7
    assert code_of("gill-color", "b") == 3
    assert code_of("gill-color", "r") == 6
    assert code_of("cap-shape", "c") == 2
    assert code_of("habitat", "d") == 7
    with pytest.raises(ValidationError):
        code_of("odor", "q")
    with pytest.raises(ValidationError):
        code_of("not-an-attribute", "a")


def test_schema_names(mushroom):
    names = [a.name for a in mushroom.attributes]
    assert names[0] == "cap-shape"
    assert names[4] == "odor"
    assert names[21] == "habitat"
    assert all(a.mtype.kind == "nominal" for a in mushroom.attributes)


def test_known_value_counts(mushroom):
    odor = mushroom.column(5)
    assert int((odor == 5).sum()) == 2160  # foul
    assert int((odor == 7).sum()) == 3528  # none
    cap = mushroom.column(1)
    assert int((cap == 2).sum()) == 4  # conical
    gill = mushroom.column(9)
    assert int((gill == 6).sum()) == 24  # green


def test_codebook_reconciliation_oracle(mushroom):
    # Brute force over all 6-value subsets of attribute 5: under the
    # documentation-order coding exactly one subset covers 3796 cases all
    # of class 1. Anchors every table check that follows.
    odor = mushroom.column(5)
    poisonous = mushroom.class_mask(1)
    hits = []
    for subset in combinations(range(1, 10), 6):
        covered = np.isin(odor, subset)
        n = int(covered.sum())
        if n == 3796 and bool((poisonous | ~covered).all()):
            hits.append(subset)
    assert hits == [(3, 4, 5, 6, 8, 9)]


def test_loader_rejects_malformed_rows(tmp_path):
    bad = tmp_path / "short.data"
    bad.write_text("p,x,s\n")
    with pytest.raises(ValidationError):
        load_mushroom(bad)


def test_schema_is_reusable():
    attrs = mushroom_schema()
    assert len(attrs) == 22
    assert attrs[4].codebook.encode("f") == 5
    assert attrs[4].name == "odor"
