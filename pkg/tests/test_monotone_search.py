import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.data_model import ValidationError
from artifact.monotone_search import (
    TraversalPolicy,
    build_chains,
    chains_dump,
    monotone_search,
    vector_str,
)


def all_vectors(n):
    return [tuple((w >> i) & 1 for i in range(n))[::-1] for w in range(2**n)]


def geq(a, b):
    return all(x >= y for x, y in zip(a, b))


def random_monotone(n, rng):
    """Upset generated by a few random seed vectors; f(v)=1 iff v >= a seed.

    The all-zeros vector is reserved as failure by the search, so seeds are
    drawn nonzero (a zero seed would make f constant-true including 0^n).
    """
    def nonzero():
        while True:
            v = tuple(rng.randint(0, 1) for _ in range(n))
            if any(v):
                return v

    seeds = [nonzero() for _ in range(rng.randint(1, 4))]
    return lambda v: any(geq(v, s) for s in seeds)


@pytest.mark.parametrize("n", range(1, 13))
def test_chains_partition_binary_cube(n):
    chains = build_chains(n)
    seen = [v for chain in chains for v in chain]
    assert len(seen) == 2**n
    assert len(set(seen)) == 2**n
    assert len(chains) == comb(n, n // 2)


@pytest.mark.parametrize("n", range(1, 13))
def test_chains_are_saturated(n):
    for chain in build_chains(n):
        for lo, hi in zip(chain, chain[1:]):
            assert sum(hi) == sum(lo) + 1
            assert geq(hi, lo)


def test_three_bit_chain_shape():
    chains = build_chains(3)
    assert sorted(len(c) for c in chains) == [2, 2, 4]
    assert chains_dump(chains).splitlines() == [
        "chain 1: 010 110",
        "chain 2: 100 101",
        "chain 3: 000 001 011 111",
    ]


def test_build_chains_rejects_bad_width():
    with pytest.raises(ValidationError):
        build_chains(0)


def test_walkthrough_query_sequence():
    # minimal true vectors 110, 101, 011: six queries resolve the cube
    truths = {(1, 1, 0), (1, 0, 1), (0, 1, 1)}
    f = lambda v: any(geq(v, t) for t in truths)
    res = monotone_search(build_chains(3), f, TraversalPolicy(start="bottom"))
    assert [vector_str(v) for v in res.query_trace] == [
        "010", "110", "100", "101", "001", "011",
    ]
    assert res.labels[(1, 1, 1)] is True  # inferred, never queried
    assert res.labels[(0, 0, 0)] is False
    assert res.inferred_count == 2


@pytest.mark.parametrize("n", range(3, 9))
def test_restoration_matches_exhaustive(n):
    rng = random.Random(20_000 + n)
    chains = build_chains(n)
    vectors = all_vectors(n)
    for trial in range(40):
        f = random_monotone(n, rng)
        res = monotone_search(chains, f, TraversalPolicy())
        for v in vectors:
            assert res.labels[v] == f(v), (n, trial, v)
        expected = {v for v in vectors if f(v)}
        assert set(res.successes()) == expected
        if 0 < len(expected) < 2**n:
            assert res.query_count < 2**n


def test_query_never_repeats():
    rng = random.Random(7)
    for n in (4, 6):
        chains = build_chains(n)
        for _ in range(20):
            f = random_monotone(n, rng)
            calls = []

            def counted(v):
                calls.append(v)
                return f(v)

            monotone_search(chains, counted)
            assert len(calls) == len(set(calls))


@pytest.mark.parametrize("start", ["bottom", "top", "middle"])
def test_policies_agree_on_labels(start):
    rng = random.Random(99)
    chains = build_chains(5)
    for _ in range(25):
        f = random_monotone(5, rng)
        res = monotone_search(chains, f, TraversalPolicy(start=start))
        assert all(res.labels[v] == f(v) for v in all_vectors(5))


def test_non_monotone_evaluator_yields_monotone_labels():
    # labels spread to every comparable vector right after a query, so a
    # contradicting vector is never reached: the output is the monotone
    # closure of the answers actually given
    f = lambda v: v == (1, 0, 0)
    res = monotone_search(build_chains(3), f)
    labs = res.labels
    for a in all_vectors(3):
        for b in all_vectors(3):
            if geq(b, a) and labs[a]:
                assert labs[b]


def test_constant_functions():
    chains = build_chains(4)
    res_true = monotone_search(chains, lambda v: True)
    assert all(res_true.labels[v] for v in all_vectors(4) if any(v))
    res_false = monotone_search(chains, lambda v: False)
    assert not any(res_false.labels[v] for v in all_vectors(4))


@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40)
def test_restoration_property(n, seed):
    rng = random.Random(seed)
    f = random_monotone(n, rng)
    res = monotone_search(build_chains(n), f)
    assert all(res.labels[v] == f(v) for v in all_vectors(n))
