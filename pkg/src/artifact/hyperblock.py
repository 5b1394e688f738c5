"""Axis-aligned regions over mixed measurement types.

A hyperblock constrains each attribute with at most one side whose form
matches the attribute's scale: numeric sides are center/length intervals,
ordinal sides are code ranges, nominal sides are value subsets. Membership
is the conjunction of the side predicates, so a block is exactly the region
a conjunctive rule describes, and a block is pure when the cases inside it
belong to one class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data_model import Dataset, ValidationError
from .rule_engine import Clause, Rule

# side kinds legal per measurement kind
_SIDE_FOR_KIND = {
    "nominal": "nominal",
    "ordinal": "ordinal",
    "interval": "numeric",
    "ratio": "numeric",
    "absolute": "numeric",
    "cyclical": "nominal",
}


@dataclass(frozen=True)
class NumericBlockSide:
    """|x - center| <= length/2, boundaries inside."""

    attribute: int
    center: float
    length: float

    kind = "numeric"

    def __post_init__(self):
        if self.length < 0:
            raise ValidationError(f"side length must be >= 0, got {self.length}")

    def contains(self, value) -> bool:
        return abs(float(value) - self.center) <= self.length / 2

    def mask(self, column: np.ndarray) -> np.ndarray:
        return np.abs(column.astype(np.float64) - self.center) <= self.length / 2


@dataclass(frozen=True)
class OrdinalBlockSide:
    """start <= x <= end in the declared code order."""

    attribute: int
    start: int
    end: int

    kind = "ordinal"

    def __post_init__(self):
        if self.start > self.end:
            raise ValidationError(f"ordinal side needs start <= end, got [{self.start}, {self.end}]")

    def contains(self, value) -> bool:
        return self.start <= value <= self.end

    def mask(self, column: np.ndarray) -> np.ndarray:
        return (column >= self.start) & (column <= self.end)


@dataclass(frozen=True)
class NominalBlockSide:
    """x in an explicit value subset."""

    attribute: int
    allowed: frozenset

    kind = "nominal"

    def __post_init__(self):
        allowed = frozenset(int(v) for v in self.allowed)
        if not allowed:
            raise ValidationError("nominal side needs a non-empty value set")
        object.__setattr__(self, "allowed", allowed)

    def contains(self, value) -> bool:
        return int(value) in self.allowed

    def mask(self, column: np.ndarray) -> np.ndarray:
        return np.isin(column, sorted(self.allowed))


@dataclass(frozen=True)
class HeterogeneousHyperblock:
    """Conjunction of sides, at most one per attribute.

    Attributes without a side are unconstrained; the empty block is the
    whole space.
    """

    sides: tuple

    def __post_init__(self):
        sides = tuple(self.sides)
        attrs = [s.attribute for s in sides]
        if len(set(attrs)) != len(attrs):
            raise ValidationError("hyperblock has two sides on one attribute")
        object.__setattr__(self, "sides", sides)

    def side_for(self, attribute: int):
        for s in self.sides:
            if s.attribute == attribute:
                return s
        return None


def _guard_sides(hb: HeterogeneousHyperblock, dataset: Dataset) -> None:
    for side in hb.sides:
        schema = dataset.schema(side.attribute)
        expected = _SIDE_FOR_KIND[schema.mtype.kind]
        if side.kind == "nominal" and expected in ("nominal", "ordinal"):
            continue  # a value subset is meaningful wherever equality is
        if side.kind != expected:
            raise ValidationError(
                f"{side.kind} side is not meaningful on {schema.mtype.kind} "
                f"attribute {schema.name!r}"
            )


def contains(hb: HeterogeneousHyperblock, case: Sequence) -> bool:
    """True iff every side admits the case's value."""
    for side in hb.sides:
        if not side.contains(case[side.attribute - 1]):
            return False
    return True


def contained_mask(hb: HeterogeneousHyperblock, dataset: Dataset) -> np.ndarray:
    _guard_sides(hb, dataset)
    mask = np.ones(dataset.n_cases, dtype=bool)
    for side in hb.sides:
        mask &= side.mask(dataset.column(side.attribute))
    return mask


@dataclass(frozen=True)
class PurityReport:
    histogram: dict
    contained: int
    pure: bool
    dominant_class: int | None

    def as_dict(self) -> dict:
        return {
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "contained": self.contained,
            "pure": self.pure,
            "dominant_class": self.dominant_class,
        }


def purity(hb: HeterogeneousHyperblock, dataset: Dataset) -> PurityReport:
    """Class histogram of the contained cases; empty blocks are not pure."""
    mask = contained_mask(hb, dataset)
    labels = dataset.class_labels[mask]
    histogram = {cid: int(np.count_nonzero(labels == cid)) for cid in dataset.class_ids}
    present = [cid for cid, count in histogram.items() if count]
    dominant = None
    if present:
        dominant = max(histogram, key=lambda cid: (histogram[cid], -cid))
    return PurityReport(
        histogram=histogram,
        contained=int(mask.sum()),
        pure=len(present) == 1,
        dominant_class=dominant,
    )


def block_to_rule(hb: HeterogeneousHyperblock, dataset: Dataset, target_class: int) -> Rule:
    """Conjunctive rule whose clauses mirror the categorical sides.

    Numeric sides have no clause form; they are rejected so the identity
    between block membership and rule evaluation stays exact.
    """
    clauses = []
    for side in hb.sides:
        if side.kind == "nominal":
            clauses.append(Clause(side.attribute, "include", tuple(sorted(side.allowed))))
        elif side.kind == "ordinal":
            values = tuple(range(side.start, side.end + 1))
            clauses.append(Clause(side.attribute, "include", values))
        else:
            raise ValidationError("numeric sides have no clause equivalent")
    if not clauses:
        raise ValidationError("hyperblock with no categorical sides makes no rule")
    return Rule(tuple(clauses), target_class)
