"""Hansel chains over {0,1}^n and query-minimizing monotone search.

A bit vector marks which attributes of a group a rule may use: (110) means
only the first two. Chains are saturated, totally ordered under the bitwise
partial order, and the standard family partitions the whole cube, so a
monotone yes/no property can be restored with far fewer queries than 2^n:
a success propagates to every vector above it, a failure to every vector
below, across all chains.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

from .data_model import ValidationError

Vector = tuple

MAX_WIDTH = 24


class NonMonotoneEvaluator(RuntimeError):
    """Evaluator answers contradict monotonicity."""

    def __init__(self, vector, message):
        self.vector = vector
        super().__init__(message)


@dataclass(frozen=True)
class TraversalPolicy:
    start: str = "bottom"  # bottom | top | middle
    chain_order: str = "given"  # given | longest-first

    def __post_init__(self):
        if self.start not in ("bottom", "top", "middle"):
            raise ValidationError(f"unknown start policy {self.start!r}")
        if self.chain_order not in ("given", "longest-first"):
            raise ValidationError(f"unknown chain order {self.chain_order!r}")


def build_chains(n: int) -> list:
    """Hansel chain partition of {0,1}^n.

    Built by the recursive doubling step: each chain C of width n-1 yields
    [0v for v in C] + [1 * last(C)] and [1v for v in C minus last]. Chains
    are returned shortest first, ties by their first vector, which for n=3
    gives [(010),(110)], [(100),(101)], [(000),(001),(011),(111)].
    """
    if not 1 <= n <= MAX_WIDTH:
        raise ValidationError(f"group size must be 1..{MAX_WIDTH}, got {n}")
    chains = [[(0,), (1,)]]
    for _ in range(n - 1):
        grown = []
        for chain in chains:
            upper = [(0,) + v for v in chain] + [(1,) + chain[-1]]
            lower = [(1,) + v for v in chain[:-1]]
            grown.append(upper)
            if lower:
                grown.append(lower)
        chains = grown
    chains.sort(key=lambda c: (len(c), c[0]))
    assert len(chains) == comb(n, n // 2)
    return chains


def vector_str(vector: Vector) -> str:
    return "".join(str(b) for b in vector)


def chains_dump(chains: Sequence[Sequence[Vector]]) -> str:
    """Debug listing, one line per chain: 'chain 1: 010 110'."""
    lines = []
    for i, chain in enumerate(chains, start=1):
        lines.append(f"chain {i}: " + " ".join(vector_str(v) for v in chain))
    return "\n".join(lines)


@dataclass(frozen=True)
class SearchResult:
    labels: dict
    query_trace: tuple

    @property
    def query_count(self) -> int:
        return len(self.query_trace)

    @property
    def inferred_count(self) -> int:
        return len(self.labels) - self.query_count

    def successes(self) -> list:
        return sorted(v for v, lab in self.labels.items() if lab)


def _to_int(vector: Vector) -> int:
    word = 0
    for i, bit in enumerate(vector):
        if bit:
            word |= 1 << i
    return word


def monotone_search(
    chains: Sequence[Sequence[Vector]],
    evaluator: Callable[[Vector], bool],
    policy: TraversalPolicy = TraversalPolicy(),
) -> SearchResult:
    """Label every vector success/failure with as few queries as possible.

    The evaluator must be monotone non-decreasing: success at v implies
    success at every w >= v. The all-zeros vector is never queried; it is
    labeled failure up front. Labels spread across chains after each query:
    success upward, failure downward. Contradictory propagation raises
    NonMonotoneEvaluator.
    """
    if not chains:
        raise ValidationError("no chains given")
    n = len(chains[0][0])
    total = 1 << n
    labels = [None] * total  # index = bit i set -> attribute i used
    labels[0] = False
    trace = []

    def note(word: int, value: bool, origin: Vector):
        if labels[word] is None:
            labels[word] = value
        elif labels[word] != value:
            raise NonMonotoneEvaluator(
                origin,
                f"query at {vector_str(origin)} contradicts the label of "
                f"{vector_str(tuple((word >> i) & 1 for i in range(n)))}",
            )

    def propagate(word: int, value: bool, origin: Vector):
        note(word, value, origin)
        if value:
            # every superset of word succeeds
            comp = (total - 1) ^ word
            sub = comp
            while sub:
                note(word | sub, True, origin)
                sub = (sub - 1) & comp
        else:
            sub = word
            while sub:
                note(sub, False, origin)
                sub = (sub - 1) & word
            note(0, False, origin)

    def query(vector: Vector) -> bool:
        result = bool(evaluator(vector))
        trace.append(vector)
        propagate(_to_int(vector), result, vector)
        return result

    ordered = list(chains)
    if policy.chain_order == "longest-first":
        ordered.sort(key=len, reverse=True)

    for chain in ordered:
        words = [_to_int(v) for v in chain]
        if policy.start == "bottom":
            for vector, word in zip(chain, words):
                if labels[word] is None:
                    if query(vector):
                        break
        elif policy.start == "top":
            for vector, word in zip(reversed(chain), reversed(words)):
                if labels[word] is None:
                    if not query(vector):
                        break
        else:  # middle: bisect the unlabeled span, which stays contiguous
            lo, hi = 0, len(chain) - 1
            while lo <= hi:
                while lo <= hi and labels[words[lo]] is not None:
                    lo += 1
                while lo <= hi and labels[words[hi]] is not None:
                    hi -= 1
                if lo > hi:
                    break
                mid = (lo + hi + 1) // 2
                if query(chain[mid]):
                    hi = mid - 1
                else:
                    lo = mid + 1

    result_labels = {}
    for word in range(total):
        assert labels[word] is not None
        vector = tuple((word >> i) & 1 for i in range(n))
        result_labels[vector] = labels[word]
    return SearchResult(result_labels, tuple(trace))
