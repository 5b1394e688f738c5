import math
from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest

from artifact.data_model import ValidationError
from artifact.rule_engine import Rule, evaluate, metrics
from artifact.srg_miner import (
    GroupingStrategy,
    MinerConfig,
    Thresholds,
    config_from_document,
    form_groups,
    generate_rules_for_group,
    most_frequent_attributes,
    run_miner,
    srg1,
    srg2,
)

from conftest import make_dataset


# --- grouping ---------------------------------------------------------------

def test_sequential_groups_absorb_short_tail():
    g = form_groups(GroupingStrategy(kind="sequential", size=3), 22)
    assert g == ((1, 2, 3), (4, 5, 6), (7, 8, 9), (10, 11, 12),
                 (13, 14, 15), (16, 17, 18), (19, 20, 21, 22))
    assert form_groups(GroupingStrategy(kind="sequential", size=4), 8) == (
        (1, 2, 3, 4), (5, 6, 7, 8))


def test_random_groups_are_seeded():
    s = GroupingStrategy(kind="random", size=3, count=10, seed=5)
    a = form_groups(s, 22)
    b = form_groups(s, 22)
    assert a == b
    c = form_groups(GroupingStrategy(kind="random", size=3, count=10, seed=6), 22)
    assert a != c
    assert all(len(g) == 3 for g in a)
    assert all(1 <= x <= 22 for g in a for x in g)


def test_expert_groups_validated():
    s = GroupingStrategy(kind="expert", groups=((9, 5, 7, 11), (13, 14, 15, 6)))
    assert form_groups(s, 22) == ((9, 5, 7, 11), (13, 14, 15, 6))
    with pytest.raises(ValidationError):
        form_groups(GroupingStrategy(kind="expert", groups=((1, 1),)), 22)
    with pytest.raises(ValidationError):
        form_groups(GroupingStrategy(kind="expert", groups=((1, 44),)), 22)
    with pytest.raises(ValidationError):
        GroupingStrategy(kind="mystery")


def test_most_frequent_attributes():
    from artifact.rule_engine import include

    rules_by_group = [
        [Rule((include(1, 1),), 1), Rule((include(1, 2), include(2, 1)), 1)],
        [Rule((include(2, 3),), 1)],
    ]
    # attribute 1 is in every rule of group 0; attribute 2 in half of each
    freq = most_frequent_attributes(rules_by_group, threshold=0.5)
    assert 1 in freq and 2 in freq


# --- thresholds -------------------------------------------------------------

def test_threshold_validation_and_floor():
    t = Thresholds(min_precision=Fraction(19, 20), min_coverage=Fraction(1, 200))
    assert t.coverage_floor(3916) == 20
    assert t.coverage_floor(1) == 1
    assert Thresholds(1.0, 0.005).min_precision == 1
    with pytest.raises(ValidationError):
        Thresholds(min_precision=0)
    with pytest.raises(ValidationError):
        Thresholds(min_coverage=0)


# --- exhaustive oracle for group enumeration --------------------------------

def oracle_candidates(dataset, group, target_class, thresholds):
    """Brute-force re-derivation of the per-group rule set.

    Independent of the miner: plain numpy masks, explicit loops over every
    attribute subset and every option combination, no lattice pruning.
    """
    N = dataset.n_cases
    n_target = dataset.class_count(target_class)
    target = dataset.class_mask(target_class)
    cov = Fraction(thresholds.min_coverage)
    prec = Fraction(thresholds.min_precision)
    floor = max(1, math.ceil(cov * n_target))

    options = {}
    for a in group:
        col = dataset.column(a)
        present = sorted(int(v) for v in np.unique(col))
        bar = max(1, math.ceil(cov * N / len(present)))
        usable = [v for v in present if int((col == v).sum()) >= bar]
        opts = []
        seen = set()
        for v in usable:
            key = ("include", (v,))
            seen.add(key)
            opts.append((key, col == v))
        for v in present:
            rest = tuple(w for w in usable if w != v)
            if not rest:
                continue
            if len(rest) == len(present) - 1:
                key = ("exclude", (v,))
                mask = col != v
            else:
                key = ("include", rest)
                mask = np.isin(col, rest)
            if key in seen:
                continue
            seen.add(key)
            opts.append((key, mask))
        options[a] = opts

    raw = []
    for size in range(1, len(group) + 1):
        for sub in combinations(sorted(group), size):
            for combo in product(*(options[a] for a in sub)):
                mask = np.ones(N, dtype=bool)
                for _, m in combo:
                    mask &= m
                n_cov = int(mask.sum())
                if n_cov < floor:
                    continue
                n_cor = int((mask & target).sum())
                if Fraction(n_cor, n_cov) < prec:
                    continue
                sig = tuple(
                    (a, pol, vals) for a, ((pol, vals), _) in zip(sub, combo)
                )
                raw.append(sig)

    # single include literals merge per attribute; everything else survives
    # as-is, duplicates collapsed
    merged_values = {}
    out = set()
    for sig in raw:
        if len(sig) == 1 and sig[0][1] == "include":
            a = sig[0][0]
            merged_values.setdefault(a, set()).update(sig[0][2])
        else:
            out.add(sig)
    for a, values in merged_values.items():
        out.add(((a, "include", tuple(sorted(values))),))

    final = set()
    for sig in out:
        mask = np.ones(N, dtype=bool)
        for a, pol, vals in sig:
            m = np.isin(dataset.column(a), vals)
            mask &= ~m if pol == "exclude" else m
        final.add((sig, int(mask.sum()), int((mask & target).sum())))
    return final


def candidate_signature(cand):
    sig = tuple(
        (c.attribute, c.polarity, tuple(sorted(c.values)))
        for c in sorted(cand.rule.clauses, key=lambda c: c.attribute)
    )
    return (sig, cand.n_covered, cand.n_correct)


@pytest.mark.parametrize("group,thresholds", [
    ((4, 5, 6), Thresholds(Fraction(1), Fraction(1, 200))),
    ((7, 8, 9), Thresholds(Fraction(19, 20), Fraction(1, 100))),
    ((19, 20, 21, 22), Thresholds(Fraction(19, 20), Fraction(1, 200))),
    ((1, 2), Thresholds(Fraction(3, 4), Fraction(1, 50))),
])
def test_group_enumeration_matches_oracle(mushroom, group, thresholds):
    rng = np.random.default_rng(42)
    rows = rng.choice(mushroom.n_cases, size=500, replace=False)
    sub = mushroom.subset(sorted(rows))
    got = {candidate_signature(c)
           for c in generate_rules_for_group(group, sub, 1, thresholds)}
    want = oracle_candidates(sub, group, 1, thresholds)
    assert got == want


def test_pruned_equals_unpruned(mushroom):
    rng = np.random.default_rng(7)
    rows = sorted(rng.choice(mushroom.n_cases, size=400, replace=False))
    sub = mushroom.subset(rows)
    t = Thresholds(Fraction(19, 20), Fraction(1, 100))
    a = [candidate_signature(c)
         for c in generate_rules_for_group((4, 5, 6), sub, 1, t, prune=True)]
    b = [candidate_signature(c)
         for c in generate_rules_for_group((4, 5, 6), sub, 1, t, prune=False)]
    assert a == b


def test_group_size_limit(mushroom):
    with pytest.raises(ValidationError):
        generate_rules_for_group(tuple(range(1, 9)), mushroom, 1, Thresholds())


# --- selection walk ---------------------------------------------------------

def test_candidates_sorted_by_coverage(mushroom):
    cands = generate_rules_for_group((4, 5, 6), mushroom, 1, Thresholds())
    covers = [c.n_covered for c in cands]
    assert covers == sorted(covers, reverse=True)
    assert cands[0].n_covered == 3796


def test_srg1_error_containment():
    # dominant imperfect rule first; a later rule may only add correct cases
    # and must keep its errors inside the committed error set
    ds = make_dataset(
        columns=[
            [1, 1, 1, 1, 1, 1, 2, 2, 3, 3, 3, 3],
            [1, 1, 2, 2, 3, 3, 1, 2, 1, 1, 2, 2],
        ],
        labels=[1, 1, 1, 1, 1, 2, 1, 1, 2, 2, 2, 2],
    )
    res = srg1(ds, [(1, 2)], Thresholds(Fraction(4, 5), Fraction(1, 12)))
    covered = np.zeros(ds.n_cases, dtype=bool)
    mis = set()
    for sr in res.rules:
        rows = {i for i in range(ds.n_cases)
                if evaluate(sr.rule, ds.case(i)) and ds.class_labels[i] != 1}
        if mis or sr is not res.rules[0]:
            assert rows <= mis or not mis
        mis |= rows
    assert res.summary["cases_covered"] >= res.summary["cases_correct"]


def test_srg2_complementary_subtraction():
    # class 1 rule x1=1 misclassifies two class-2 cases; both are x2=3, so
    # the complementary class-2 rule carves them out exactly
    ds = make_dataset(
        columns=[
            [1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2],
            [1, 1, 1, 2, 2, 2, 3, 3, 1, 2, 3, 3],
        ],
        labels=[1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2],
    )
    res = srg2(ds, Thresholds(Fraction(3, 4), Fraction(1, 12)),
               groups=[(1, 2)], target_class=1)
    assert res.summary["misclassified"] == 0
    assert res.complementary
    assert res.final_rules
    for rule in res.final_rules:
        for i in range(ds.n_cases):
            if evaluate(rule, ds.case(i)):
                assert ds.class_labels[i] == 1


# --- mushroom end to end ------------------------------------------------------

def test_srg1_sequential_on_mushroom(mushroom):
    groups = form_groups(GroupingStrategy(kind="sequential", size=3), 22)
    res = srg1(mushroom, groups, Thresholds(Fraction(1), Fraction(1, 200)))
    assert [sr.metrics.N_covered for sr in res.rules] == [
        3796, 1752, 1340, 1184, 388, 72, 52]
    assert [sr.added_correct for sr in res.rules] == [3796, 24, 8, 32, 24, 24, 8]
    assert res.summary["cases_correct"] == 3916
    assert res.summary["misclassified"] == 0
    assert all(sr.metrics.precision == 1 for sr in res.rules)


def test_run_miner_and_config_round_trip(mushroom):
    cfg = MinerConfig(
        algorithm="srg1",
        grouping=GroupingStrategy(kind="sequential", size=3),
        thresholds=Thresholds(Fraction(1), Fraction(1, 200)),
        target_class=1,
    )
    assert config_from_document(cfg.to_document()) == cfg
    res = run_miner(cfg, mushroom)
    assert res.algorithm == "srg1"
    doc = res.to_document()
    assert doc["summary"]["cases_correct"] == 3916
    assert len(doc["rules"]) == 7
    assert doc["rules"][0]["metrics"]["N_covered"] == 3796


def test_selected_rule_metrics_recomputable(mushroom):
    groups = form_groups(GroupingStrategy(kind="sequential", size=3), 22)
    res = srg1(mushroom, groups, Thresholds(Fraction(1), Fraction(1, 200)))
    for sr in res.rules:
        m = metrics(sr.rule, mushroom)
        assert (m.N_covered, m.N_correct) == (sr.metrics.N_covered, sr.metrics.N_correct)
