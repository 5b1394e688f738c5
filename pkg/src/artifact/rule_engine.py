"""Conjunctive rules over coded attributes: evaluation, metrics, complexity,
overlap analysis, reversal, merging, and complementary combination.

A rule is a conjunction with at most one clause per attribute. A clause
holds a value set with include or exclude polarity: include {v} reads
x_i = v, include {a,b} reads x_i in {a,b}, exclude {v} reads x_i != v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .data_model import Dataset, ValidationError

POLARITIES = ("include", "exclude")


class ConflictError(RuntimeError):
    """Firing rules disagree on the predicted class."""

    def __init__(self, votes):
        self.votes = dict(votes)
        super().__init__(f"rules disagree on class: votes {self.votes}")


@dataclass(frozen=True)
class Clause:
    attribute: int
    polarity: str
    values: tuple

    def __post_init__(self):
        if self.attribute < 1:
            raise ValidationError(f"clause attribute must be >= 1, got {self.attribute}")
        if self.polarity not in POLARITIES:
            raise ValidationError(f"clause polarity must be include or exclude, got {self.polarity!r}")
        vals = tuple(sorted(set(int(v) for v in self.values)))
        if not vals:
            raise ValidationError("clause value set must not be empty")
        object.__setattr__(self, "values", vals)

    @property
    def sort_key(self) -> tuple:
        return (self.attribute, 0 if self.polarity == "include" else 1, self.values)

    def matches(self, value) -> bool:
        inside = int(value) in self.values
        return inside if self.polarity == "include" else not inside

    def __str__(self):
        if self.polarity == "include":
            if len(self.values) == 1:
                return f"(x{self.attribute}={self.values[0]})"
            return "[" + " v ".join(f"(x{self.attribute}={v})" for v in self.values) + "]"
        if len(self.values) == 1:
            return f"(x{self.attribute}!={self.values[0]})"
        return "[" + " & ".join(f"(x{self.attribute}!={v})" for v in self.values) + "]"


def include(attribute: int, *values) -> Clause:
    return Clause(attribute, "include", tuple(values))


def exclude(attribute: int, *values) -> Clause:
    return Clause(attribute, "exclude", tuple(values))


@dataclass(frozen=True)
class Rule:
    clauses: tuple
    target_class: int

    def __post_init__(self):
        clauses = tuple(sorted(self.clauses, key=lambda c: c.sort_key))
        if not clauses:
            raise ValidationError("a rule needs at least one clause")
        attrs = [c.attribute for c in clauses]
        if len(set(attrs)) != len(attrs):
            raise ValidationError(f"duplicate clause attributes in rule: {attrs}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def attributes(self) -> tuple:
        return tuple(c.attribute for c in self.clauses)

    @property
    def sort_key(self) -> tuple:
        return tuple(c.sort_key for c in self.clauses)

    def __str__(self):
        body = " & ".join(str(c) for c in self.clauses)
        return f"{body} => C{self.target_class}"


@dataclass(frozen=True)
class CombinedRule:
    """base AND NOT (any subtracted rule), subtracted target the other class."""

    base: Rule
    subtracted: tuple

    def __post_init__(self):
        subs = tuple(self.subtracted)
        for sub in subs:
            if sub.target_class == self.base.target_class:
                raise ValidationError("subtracted rules must target the opposite class")
        object.__setattr__(self, "subtracted", subs)

    @property
    def target_class(self) -> int:
        return self.base.target_class

    def __str__(self):
        base = " & ".join(str(c) for c in self.base.clauses)
        if not self.subtracted:
            return f"{base} => C{self.target_class}"
        subs = " v ".join("(" + " & ".join(str(c) for c in r.clauses) + ")" for r in self.subtracted)
        return f"{base} & ~[{subs}] => C{self.target_class}"


@dataclass(frozen=True)
class ReversedRule:
    """Fires exactly where the original rule does not."""

    rule: Rule
    target_class: int


def evaluate(rule, case) -> bool:
    """Truth value of a rule (plain, combined, or reversed) on one coded row."""
    if isinstance(rule, Rule):
        return all(c.matches(case[c.attribute - 1]) for c in rule.clauses)
    if isinstance(rule, CombinedRule):
        if not evaluate(rule.base, case):
            return False
        return not any(evaluate(sub, case) for sub in rule.subtracted)
    if isinstance(rule, ReversedRule):
        return not evaluate(rule.rule, case)
    raise ValidationError(f"cannot evaluate {type(rule).__name__}")


def clause_mask(clause: Clause, dataset: Dataset) -> np.ndarray:
    col = dataset.column(clause.attribute)
    if len(clause.values) == 1:
        hit = col == clause.values[0]
    else:
        hit = np.isin(col, clause.values)
    return hit if clause.polarity == "include" else ~hit


def covered_mask(rule, dataset: Dataset) -> np.ndarray:
    """Boolean case mask of the rule's coverage."""
    if isinstance(rule, Rule):
        mask = np.ones(dataset.n_cases, dtype=bool)
        for clause in rule.clauses:
            mask &= clause_mask(clause, dataset)
        return mask
    if isinstance(rule, CombinedRule):
        mask = covered_mask(rule.base, dataset)
        for sub in rule.subtracted:
            mask &= ~covered_mask(sub, dataset)
        return mask
    if isinstance(rule, ReversedRule):
        return ~covered_mask(rule.rule, dataset)
    raise ValidationError(f"cannot evaluate {type(rule).__name__}")


def round_pct(value: Fraction, places: int = 2) -> float:
    """Percentage of a fraction, rounded half up."""
    quant = Decimal(1).scaleb(-places)
    dec = Decimal(value.numerator * 100) / Decimal(value.denominator)
    return float(dec.quantize(quant, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class RuleMetrics:
    """Counts and exact-rational quality measures of a rule on a dataset.

    N is the size of the target class (or the two-class total when the rule
    predicts both classes). Coverage may exceed 1.
    """

    N: int
    N_correct: int
    N_incorrect: int

    @property
    def N_covered(self) -> int:
        return self.N_correct + self.N_incorrect

    @property
    def recall(self) -> Fraction:
        return Fraction(self.N_correct, self.N) if self.N else Fraction(0)

    @property
    def precision(self) -> Fraction:
        covered = self.N_covered
        return Fraction(self.N_correct, covered) if covered else Fraction(0)

    @property
    def coverage(self) -> Fraction:
        return Fraction(self.N_covered, self.N) if self.N else Fraction(0)

    @property
    def recall_pct(self) -> float:
        return round_pct(self.recall)

    @property
    def precision_pct(self) -> float:
        return round_pct(self.precision)

    @property
    def coverage_pct(self) -> float:
        return round_pct(self.coverage)

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "N_correct": self.N_correct,
            "N_incorrect": self.N_incorrect,
            "N_covered": self.N_covered,
            "recall_pct": self.recall_pct,
            "precision_pct": self.precision_pct,
            "coverage_pct": self.coverage_pct,
        }


def metrics(rule, dataset: Dataset, scope: str = "target-class") -> RuleMetrics:
    """Full-scan metrics of a rule on a dataset.

    scope "target-class" sets N to the target class size; "two-class" sets
    N to the dataset size for rules meant to predict both classes.
    """
    if scope not in ("target-class", "two-class"):
        raise ValidationError(f"unknown metrics scope {scope!r}")
    target = rule.target_class
    if target not in dataset.class_names:
        raise ValidationError(f"target class {target} not present in dataset")
    mask = covered_mask(rule, dataset)
    correct = int(np.count_nonzero(mask & dataset.class_mask(target)))
    covered = int(np.count_nonzero(mask))
    n = dataset.class_count(target) if scope == "target-class" else dataset.n_cases
    return RuleMetrics(N=n, N_correct=correct, N_incorrect=covered - correct)


def clause_cost(clause: Clause) -> int:
    """Base-clause count: one per include value, one per exclude clause."""
    return len(clause.values) if clause.polarity == "include" else 1


def rule_clause_count(rule) -> int:
    if isinstance(rule, (list, tuple)):
        return sum(rule_clause_count(r) for r in rule)
    if isinstance(rule, CombinedRule):
        return rule_clause_count(rule.base) + sum(rule_clause_count(r) for r in rule.subtracted)
    return sum(clause_cost(c) for c in rule.clauses)


@dataclass(frozen=True)
class ComplexityResult:
    clauses: int
    covered: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.clauses, self.covered)

    def __str__(self):
        return f"{self.clauses}/{self.covered} = {float(self.value):.4f}"


def complexity(rules: Sequence, dataset: Dataset, counting: str = "independent") -> ComplexityResult:
    """Set complexity: total base clauses over covered cases.

    counting "independent" sums each rule's coverage; "distinct" counts each
    case once across the whole set. An element that is itself a list/tuple is
    one disjunctive rule: its branches share a single coverage count (union)
    while their clauses all count.
    """
    rules = list(rules)
    if not rules:
        raise ValidationError("complexity needs at least one rule")
    if counting not in ("independent", "distinct"):
        raise ValidationError(f"unknown counting mode {counting!r}")
    total_clauses = sum(rule_clause_count(r) for r in rules)

    def mask_of(r):
        if isinstance(r, (list, tuple)):
            m = np.zeros(dataset.n_cases, dtype=bool)
            for branch in r:
                m |= covered_mask(branch, dataset)
            return m
        return covered_mask(r, dataset)

    masks = [mask_of(r) for r in rules]
    if counting == "independent":
        covered = sum(int(np.count_nonzero(m)) for m in masks)
    else:
        union = np.zeros(dataset.n_cases, dtype=bool)
        for m in masks:
            union |= m
        covered = int(np.count_nonzero(union))
    if covered == 0:
        raise ValidationError("complexity undefined: rules cover no cases")
    return ComplexityResult(total_clauses, covered)


@dataclass(frozen=True)
class OverlapResult:
    overlap_cases: int
    union_cases: int
    added_cases: int
    not_covered_by_first: int

    @property
    def overlap_fraction(self) -> Fraction:
        return Fraction(self.overlap_cases, self.union_cases) if self.union_cases else Fraction(0)

    @property
    def overlap_pct(self) -> float:
        return 100.0 * self.overlap_cases / self.union_cases if self.union_cases else 0.0

    @property
    def added_pct(self) -> float:
        if self.not_covered_by_first == 0:
            return 0.0
        return 100.0 * self.added_cases / self.not_covered_by_first


def overlap(r1, r2, dataset: Dataset, class_id: Optional[int] = None) -> OverlapResult:
    """Overlap of two rules on correctly covered class cases.

    added_cases counts class cases r2 covers that r1 misses; added_pct is
    relative to the class cases r1 leaves uncovered.
    """
    if class_id is None:
        if r1.target_class != r2.target_class:
            raise ValidationError("rules target different classes, pass class_id explicitly")
        class_id = r1.target_class
    cls = dataset.class_mask(class_id)
    c1 = covered_mask(r1, dataset) & cls
    c2 = covered_mask(r2, dataset) & cls
    inter = int(np.count_nonzero(c1 & c2))
    union = int(np.count_nonzero(c1 | c2))
    added = int(np.count_nonzero(c2 & ~c1))
    remaining = int(np.count_nonzero(cls & ~c1))
    return OverlapResult(inter, union, added, remaining)


def reverse_rule(rule: Rule, other_class: int) -> ReversedRule:
    """Predicate true exactly where the rule is false, for the other class."""
    if other_class == rule.target_class:
        raise ValidationError("reversal must target the other class")
    return ReversedRule(rule, other_class)


def merge_rules(rules: Sequence[Rule]) -> list:
    """Merge rules that differ only in an include clause on one attribute.

    All rules in a merge bucket are unioned at once, so six single-value
    siblings collapse into one value-set rule in a single pass. Runs to a
    fixpoint; output is deterministically ordered.
    """
    current = sorted(set(rules), key=lambda r: (r.target_class, r.sort_key))
    while True:
        buckets = {}
        order = []
        for rule in current:
            placed = False
            for pos, clause in enumerate(rule.clauses):
                if clause.polarity != "include":
                    continue
                rest = tuple(c.sort_key for i, c in enumerate(rule.clauses) if i != pos)
                key = (rule.target_class, clause.attribute, rest)
                if key in buckets:
                    buckets[key].append((rule, pos))
                    placed = True
                    break
            if not placed:
                for pos, clause in enumerate(rule.clauses):
                    if clause.polarity != "include":
                        continue
                    rest = tuple(c.sort_key for i, c in enumerate(rule.clauses) if i != pos)
                    key = (rule.target_class, clause.attribute, rest)
                    buckets[key] = [(rule, pos)]
                    order.append(key)
                    placed = True
                    break
            if not placed:
                key = ("opaque", rule.sort_key, rule.target_class)
                buckets[key] = [(rule, None)]
                order.append(key)
        merged = []
        changed = False
        for key in order:
            members = buckets[key]
            if len(members) == 1 or members[0][1] is None:
                merged.extend(r for r, _ in members)
                if len(members) > 1:
                    changed = True
                continue
            values = set()
            for rule, pos in members:
                values.update(rule.clauses[pos].values)
            base, pos = members[0]
            new_clause = Clause(base.clauses[pos].attribute, "include", tuple(values))
            clauses = tuple(c for i, c in enumerate(base.clauses) if i != pos) + (new_clause,)
            merged.append(Rule(clauses, base.target_class))
            changed = True
        current = sorted(set(merged), key=lambda r: (r.target_class, r.sort_key))
        if not changed:
            return current


def combine(base: Rule, complementary: Sequence[Rule]) -> CombinedRule:
    """Subtract opposite-class rules from a base rule."""
    return CombinedRule(base, tuple(complementary))


@dataclass(frozen=True)
class Prediction:
    class_id: Optional[int]
    votes: int

    @property
    def unclassified(self) -> bool:
        return self.class_id is None


def predict(rules: Sequence, case) -> Prediction:
    """Class of the firing rules for one case, with a vote count.

    No firing rule leaves the case unclassified. Firing rules that disagree
    raise ConflictError with the per-class votes.
    """
    votes = {}
    for rule in rules:
        if evaluate(rule, case):
            votes[rule.target_class] = votes.get(rule.target_class, 0) + 1
    if not votes:
        return Prediction(None, 0)
    if len(votes) > 1:
        raise ConflictError(votes)
    ((cls, count),) = votes.items()
    return Prediction(cls, count)


# --- serialization ----------------------------------------------------------


def rule_to_json(rule) -> dict:
    if isinstance(rule, CombinedRule):
        return {
            "base": rule_to_json(rule.base),
            "subtracted": [rule_to_json(r) for r in rule.subtracted],
            "class": rule.target_class,
        }
    return {
        "clauses": [
            {"attr": c.attribute, "polarity": c.polarity, "values": list(c.values)}
            for c in rule.clauses
        ],
        "class": rule.target_class,
    }


def rule_from_json(doc: dict):
    if "base" in doc:
        base = rule_from_json(doc["base"])
        subs = tuple(rule_from_json(d) for d in doc.get("subtracted", []))
        return CombinedRule(base, subs)
    try:
        clauses = tuple(
            Clause(int(c["attr"]), c["polarity"], tuple(c["values"])) for c in doc["clauses"]
        )
        return Rule(clauses, int(doc["class"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed rule document: {exc}") from None


def format_rule(rule) -> str:
    return str(rule)
