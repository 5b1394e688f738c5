from fractions import Fraction

import numpy as np
import pytest

from artifact.data_model import ValidationError
from artifact.srg_miner import (
    GroupingStrategy,
    MinerConfig,
    Thresholds,
    kfold_cv,
    make_folds,
)

from conftest import make_dataset


def test_folds_partition_everything():
    labels = np.array([1, 2] * 50)
    folds = make_folds(labels, 10, seed=3)
    seen = np.concatenate(folds)
    assert len(seen) == 100
    assert len(np.unique(seen)) == 100
    assert all(len(f) == 10 for f in folds)


def test_stratified_folds_balance_classes():
    labels = np.array([1] * 30 + [2] * 70)
    for fold in make_folds(labels, 10, seed=1, stratified=True):
        fold_labels = labels[fold]
        assert int((fold_labels == 1).sum()) == 3
        assert int((fold_labels == 2).sum()) == 7


def test_fold_sizes_within_one():
    labels = np.array([1] * 47 + [2] * 56)
    sizes = sorted(len(f) for f in make_folds(labels, 10, seed=0))
    assert max(sizes) - min(sizes) <= 1
    assert sum(sizes) == 103


def test_folds_deterministic_by_seed():
    labels = np.array([1, 2, 1, 2] * 25)
    a = make_folds(labels, 5, seed=9)
    b = make_folds(labels, 5, seed=9)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    c = make_folds(labels, 5, seed=10)
    assert not all(np.array_equal(x, y) for x, y in zip(a, c))


def test_make_folds_input_validation():
    with pytest.raises(ValidationError):
        make_folds(np.array([1, 2, 1]), 1)
    with pytest.raises(ValidationError):
        make_folds(np.array([1, 2]), 3)


def test_kfold_cv_on_separable_data():
    # attribute 1 fully determines the class; every fold must be clean
    codes = [1, 2, 3, 1, 2, 3] * 10
    labels = [1 if c == 1 else 2 for c in codes]
    ds = make_dataset([codes, [1 + (i % 2) for i in range(60)]], labels)
    cfg = MinerConfig(
        algorithm="srg1",
        grouping=GroupingStrategy(kind="sequential", size=2),
        thresholds=Thresholds(Fraction(19, 20), Fraction(1, 20)),
        target_class=1,
    )
    report = kfold_cv(ds, cfg, k=5, seed=0)
    assert report.k == 5
    assert len(report.folds) == 5
    assert report.total_misclassified == 0
    assert sum(f.validation_cases for f in report.folds) == 60
    doc = report.to_document()
    assert doc["total_misclassified"] == 0
    assert "fold 1" in report.report()


def test_kfold_cv_deterministic():
    codes = [1, 2] * 30
    ds = make_dataset([codes], [1 if c == 1 else 2 for c in codes])
    cfg = MinerConfig(
        algorithm="srg0",
        grouping=GroupingStrategy(kind="sequential", size=1),
        thresholds=Thresholds(Fraction(1), Fraction(1, 30)),
        target_class=1,
    )
    a = kfold_cv(ds, cfg, k=3, seed=4)
    b = kfold_cv(ds, cfg, k=3, seed=4)
    assert a.to_document() == b.to_document()
