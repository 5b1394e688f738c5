"""Sequential rule generation over attribute groups.

The pipeline: split attributes into groups, enumerate candidate conjunctions
per group over the subset lattice (pruned by monotone search on a coverage
liveness test), merge sibling value rules, then select rules in descending
coverage order while they add new correctly covered class cases. Variants
differ in where the groups come from and whether misclassified cases are
repaired with complementary opposite-class rules (srg2).

Case sets are packed into Python ints (one bit per case) during mining;
selected rules get their metrics recomputed by rule_engine on the way out.
"""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .data_model import Dataset, ValidationError
from .monotone_search import TraversalPolicy, build_chains, monotone_search
from .rule_engine import (
    Clause,
    CombinedRule,
    Rule,
    RuleMetrics,
    covered_mask,
    merge_rules,
    metrics as rule_metrics,
    overlap,
    round_pct,
    rule_from_json,
    rule_to_json,
)

GROUP_SIZE_LIMIT = 6


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # interpret floats as written, so 0.005 means exactly 1/200
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class Thresholds:
    min_precision: Fraction = Fraction(1)
    min_coverage: Fraction = Fraction(1, 200)

    def __post_init__(self):
        p = _to_fraction(self.min_precision)
        c = _to_fraction(self.min_coverage)
        if not 0 < p <= 1:
            raise ValidationError(f"min_precision must be in (0, 1], got {p}")
        if c <= 0:
            raise ValidationError(f"min_coverage must be positive, got {c}")
        object.__setattr__(self, "min_precision", p)
        object.__setattr__(self, "min_coverage", c)

    def coverage_floor(self, n_target: int) -> int:
        """Smallest covered-case count that passes min_coverage for class size n."""
        c = self.min_coverage
        return max(1, -((-c.numerator * n_target) // c.denominator))

    def as_dict(self) -> dict:
        return {
            "precision": float(self.min_precision),
            "coverage": float(self.min_coverage),
            "precision_exact": str(self.min_precision),
            "coverage_exact": str(self.min_coverage),
        }


@dataclass(frozen=True)
class GroupingStrategy:
    """How attribute groups are formed.

    kinds: sequential (consecutive blocks of `size`), random (`count` groups
    of `size`, seeded), expert (explicit `groups`), prior (given `attributes`
    split into blocks of `size`), most_frequent (attributes appearing in at
    least `threshold` of a group's rules in `source`, regrouped by `size`).
    """

    kind: str
    size: int = 3
    count: int = 30
    seed: Optional[int] = None
    groups: tuple = ()
    attributes: tuple = ()
    threshold: float = 0.5
    source: Optional[object] = None

    def __post_init__(self):
        if self.kind not in ("sequential", "random", "expert", "prior", "most_frequent"):
            raise ValidationError(f"unknown grouping kind {self.kind!r}")
        object.__setattr__(self, "groups", tuple(tuple(int(a) for a in g) for g in self.groups))
        object.__setattr__(self, "attributes", tuple(int(a) for a in self.attributes))


def _chunk_absorb(items: Sequence[int], size: int) -> tuple:
    """Consecutive blocks of `size`; the remainder joins the last block."""
    items = list(items)
    if size < 1:
        raise ValidationError(f"group size must be >= 1, got {size}")
    full = len(items) // size
    if full == 0:
        return (tuple(items),) if items else ()
    blocks = [items[i * size:(i + 1) * size] for i in range(full)]
    rest = items[full * size:]
    if rest:
        blocks[-1] = blocks[-1] + rest
    return tuple(tuple(b) for b in blocks)


def _validate_groups(groups, n_attributes) -> tuple:
    groups = tuple(tuple(int(a) for a in g) for g in groups)
    if not groups:
        raise ValidationError("no attribute groups")
    for g in groups:
        if not g:
            raise ValidationError("empty attribute group")
        if len(set(g)) != len(g):
            raise ValidationError(f"duplicate attribute in group {g}")
        for a in g:
            if not 1 <= a <= n_attributes:
                raise ValidationError(f"attribute {a} out of range 1..{n_attributes}")
    return groups


def form_groups(strategy: GroupingStrategy, n_attributes: int) -> tuple:
    """Materialize a grouping strategy into attribute index groups."""
    if strategy.kind == "sequential":
        groups = _chunk_absorb(range(1, n_attributes + 1), strategy.size)
    elif strategy.kind == "random":
        if strategy.size > n_attributes:
            raise ValidationError("random group size exceeds attribute count")
        rng = random.Random(strategy.seed)
        groups = tuple(
            tuple(sorted(rng.sample(range(1, n_attributes + 1), strategy.size)))
            for _ in range(strategy.count)
        )
    elif strategy.kind == "expert":
        groups = strategy.groups
    elif strategy.kind == "prior":
        groups = _chunk_absorb(strategy.attributes, strategy.size)
    else:  # most_frequent
        if strategy.source is None:
            raise ValidationError("most_frequent grouping needs a source mining result")
        rules_by_group = [rules for _, rules in strategy.source.candidates_by_group]
        attrs = most_frequent_attributes(rules_by_group, strategy.threshold)
        groups = _chunk_absorb(attrs, strategy.size)
    return _validate_groups(groups, n_attributes)


def most_frequent_attributes(rules_by_group: Sequence[Sequence[Rule]], threshold: float = 0.5) -> list:
    """Attributes appearing in at least `threshold` of some group's rules,
    sorted by that appearance fraction, descending (ties by index)."""
    scores = {}
    for rules in rules_by_group:
        rules = list(rules)
        if not rules:
            continue
        counts = {}
        for rule in rules:
            for attr in rule.attributes:
                counts[attr] = counts.get(attr, 0) + 1
        for attr, cnt in counts.items():
            frac = Fraction(cnt, len(rules))
            if attr not in scores or frac > scores[attr]:
                scores[attr] = frac
    chosen = [a for a, s in scores.items() if s >= Fraction(str(threshold))]
    return sorted(chosen, key=lambda a: (-scores[a], a))


# --- packed case sets -------------------------------------------------------


def _pack(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def _unpack(word: int, n: int) -> np.ndarray:
    nbytes = (n + 7) // 8
    raw = np.frombuffer(word.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


class _MiningContext:
    """Per-dataset packed masks for one mining run."""

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.n = dataset.n_cases
        self.full = (1 << self.n) - 1
        self.class_masks = {cid: _pack(dataset.class_mask(cid)) for cid in dataset.class_ids}
        self._value_masks = {}
        self._options = {}

    def value_masks(self, attr: int) -> dict:
        cached = self._value_masks.get(attr)
        if cached is None:
            col = self.dataset.column(attr)
            cached = {int(v): _pack(col == v) for v in np.unique(col)}
            self._value_masks[attr] = cached
        return cached

    def options(self, attr: int, min_coverage: Fraction = Fraction(0)) -> list:
        """(clause, mask) choices for one attribute.

        A value too rare to matter cannot anchor a literal: no =v option,
        and it is dropped from the complements of !=v options (which then
        become explicit value lists). Rarity is judged against the
        attribute's arity, count(v) >= min_coverage * n / n_values, because
        a 12-value attribute legitimately spreads its cases far thinner
        than a binary one. A distinction that hinges on fewer observations
        than even that scaled bar is overfitting by the same argument that
        sets the rule coverage floor.
        """
        c = Fraction(min_coverage)
        key = (attr, c)
        cached = self._options.get(key)
        if cached is not None:
            return cached
        masks = self.value_masks(attr)
        bar = max(1, -((-c.numerator * self.n) // (c.denominator * len(masks)))) if c > 0 else 1
        usable = [v for v in sorted(masks) if masks[v].bit_count() >= bar]
        out = []
        seen = set()
        for v in usable:
            clause = Clause(attr, "include", (v,))
            seen.add(clause)
            out.append((clause, masks[v]))
        for v in sorted(masks):
            rest = [w for w in usable if w != v]
            if not rest:
                continue
            if len(rest) == len(masks) - 1:
                clause = Clause(attr, "exclude", (v,))
                word = self.full ^ masks[v]
            else:
                clause = Clause(attr, "include", tuple(rest))
                word = 0
                for w in rest:
                    word |= masks[w]
            if clause in seen:
                continue
            seen.add(clause)
            out.append((clause, word))
        self._options[key] = out
        return out

    def rule_mask(self, rule: Rule) -> int:
        word = self.full
        for clause in rule.clauses:
            masks = self.value_masks(clause.attribute)
            vm = 0
            for v in clause.values:
                vm |= masks.get(v, 0)
            if clause.polarity == "exclude":
                vm = self.full ^ vm
            word &= vm
        return word


@dataclass(frozen=True)
class Candidate:
    """A threshold-passing rule with its packed coverage."""

    rule: Rule
    n_covered: int
    n_correct: int
    n_target: int
    mask: int
    group: tuple

    @property
    def precision(self) -> Fraction:
        return Fraction(self.n_correct, self.n_covered) if self.n_covered else Fraction(0)

    @property
    def metrics(self) -> RuleMetrics:
        return RuleMetrics(self.n_target, self.n_correct, self.n_covered - self.n_correct)


def generate_rules_for_group(
    group: Sequence[int],
    dataset: Dataset,
    target_class: int,
    thresholds: Thresholds,
    *,
    policy: Optional[TraversalPolicy] = None,
    prune: bool = True,
    context: Optional[_MiningContext] = None,
) -> list:
    """All rules on one attribute group passing the thresholds.

    Every non-empty attribute subset of the group is a lattice vector; a
    subset is dead when no conjunction constraining exactly those attributes
    reaches the coverage floor, and deadness only spreads upward, so the
    lattice is labeled by monotone search and only live subsets are
    enumerated. Single-value include siblings are merged afterwards.
    """
    attrs = tuple(sorted(set(int(a) for a in group)))
    if len(attrs) != len(tuple(group)):
        raise ValidationError(f"duplicate attributes in group {tuple(group)}")
    ctx = context or _MiningContext(dataset)
    n_target = dataset.class_count(target_class)
    target_mask = ctx.class_masks.get(target_class, 0)
    floor = thresholds.coverage_floor(n_target)
    prec = thresholds.min_precision
    options = {a: ctx.options(a, thresholds.min_coverage) for a in attrs}
    if len(attrs) > GROUP_SIZE_LIMIT:
        estimate = 1
        for a in attrs:
            estimate *= max(1, len(options[a]))
        raise ValidationError(
            f"group {attrs} has {len(attrs)} attributes; enumeration would visit "
            f"about {estimate} conjunctions per subset (limit {GROUP_SIZE_LIMIT} attributes)"
        )

    def subset_attrs(vector) -> tuple:
        return tuple(a for a, bit in zip(attrs, vector) if bit)

    def has_covering(sub: tuple) -> bool:
        def walk(i: int, word: int) -> bool:
            if word.bit_count() < floor:
                return False
            if i == len(sub):
                return True
            return any(walk(i + 1, word & m) for _, m in options[sub[i]])

        return walk(0, ctx.full)

    if prune:
        chains = build_chains(len(attrs))
        labels = monotone_search(chains, lambda v: not has_covering(subset_attrs(v)),
                                 policy or TraversalPolicy()).labels
        live = [v for v, dead in labels.items() if not dead and any(v)]
    else:
        live = [v for v in _all_vectors(len(attrs)) if any(v)]

    raw = []

    def enumerate_subset(sub: tuple):
        clauses = []

        def walk(i: int, word: int):
            if word.bit_count() < floor:
                return
            if i == len(sub):
                n_cov = word.bit_count()
                n_cor = (word & target_mask).bit_count()
                if n_cor * prec.denominator >= prec.numerator * n_cov:
                    raw.append(Rule(tuple(clauses), target_class))
                return
            for clause, m in options[sub[i]]:
                clauses.append(clause)
                walk(i + 1, word & m)
                clauses.pop()

        walk(0, ctx.full)

    for vector in sorted(live, key=lambda v: (sum(v), v)):
        enumerate_subset(subset_attrs(vector))

    # value siblings merge only on single-attribute rules; a multi-attribute
    # conjunction keeps one option per attribute
    singles = [r for r in raw if len(r.clauses) == 1]
    multis = sorted({r for r in raw if len(r.clauses) > 1}, key=lambda r: r.sort_key)
    merged = list(merge_rules(singles)) + multis
    out = []
    for rule in merged:
        word = ctx.rule_mask(rule)
        out.append(
            Candidate(
                rule=rule,
                n_covered=word.bit_count(),
                n_correct=(word & target_mask).bit_count(),
                n_target=n_target,
                mask=word,
                group=tuple(group),
            )
        )
    out.sort(key=lambda c: (-c.n_covered, -c.precision, c.rule.sort_key))
    return out


def _all_vectors(n: int):
    for word in range(1 << n):
        yield tuple((word >> i) & 1 for i in range(n))


# --- selection and results ---------------------------------------------------


@dataclass(frozen=True)
class SelectedRule:
    rule: object  # Rule or CombinedRule
    metrics: RuleMetrics
    source_group: Optional[tuple]
    added_correct: int

    def as_dict(self) -> dict:
        return {
            "rule": rule_to_json(self.rule),
            "text": str(self.rule),
            "metrics": self.metrics.as_dict(),
            "source_group": list(self.source_group) if self.source_group else None,
            "added_correct": self.added_correct,
        }


@dataclass
class MiningResult:
    algorithm: str
    target_class: int
    target_class_name: str
    thresholds: Thresholds
    groups: tuple
    rules: tuple
    summary: dict
    complementary: tuple = ()
    final_rules: tuple = ()
    overlap_report: tuple = ()
    candidates_by_group: tuple = ()
    attribute_frequency: dict = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def ruleset(self) -> tuple:
        """Rules to apply: combined substitutions when present."""
        return self.final_rules if self.final_rules else tuple(sr.rule for sr in self.rules)

    def to_document(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "target_class": self.target_class,
            "target_class_name": self.target_class_name,
            "thresholds": self.thresholds.as_dict(),
            "groups": [list(g) for g in self.groups],
            "seed": self.seed,
            "rules": [sr.as_dict() for sr in self.rules],
            "complementary": [sr.as_dict() for sr in self.complementary],
            "final_rules": [rule_to_json(r) for r in self.ruleset],
            "final_rules_text": [str(r) for r in self.ruleset],
            "overlap": list(self.overlap_report),
            "attribute_frequency": {str(k): float(v) for k, v in sorted(self.attribute_frequency.items())},
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2) + "\n"

    def report(self) -> str:
        name = self.target_class_name
        lines = [
            f"algorithm: {self.algorithm}",
            f"target class: {name} (C{self.target_class})",
            f"thresholds: precision >= {round_pct(self.thresholds.min_precision)}%, "
            f"coverage >= {round_pct(self.thresholds.min_coverage)}%",
            "groups: " + " ".join("{" + ",".join(str(a) for a in g) + "}" for g in self.groups),
            f"Number of rules selected: {self.summary['rules_selected']}",
        ]
        for i, sr in enumerate(self.rules, start=1):
            m = sr.metrics
            lines.append(
                f"  R{i}: {sr.rule}  "
                f"[covered {m.N_covered}, correct {m.N_correct}, "
                f"precision {m.precision_pct}%, coverage {m.coverage_pct}%]"
            )
        for j, sr in enumerate(self.complementary, start=1):
            m = sr.metrics
            lines.append(
                f"  complementary C{j}: {sr.rule}  "
                f"[covered {m.N_covered}, correct {m.N_correct}]"
            )
        s = self.summary
        lines += [
            f"Total cases covered by all rules: {s['cases_covered']}",
            f"Number of correctly classified cases: {s['cases_correct']}",
            f"Number of misclassified cases by all rules: {s['misclassified']}",
            f"Number of unclassified cases of the {name} class: {s['unclassified_target']}",
            f"Actual coverage of the {name} class, %: {round_pct(Fraction(s['cases_correct'], s['target_cases'])) if s['target_cases'] else 0.0}",
            f"Actual precision, %: {round_pct(Fraction(s['cases_correct'], s['cases_covered'])) if s['cases_covered'] else 0.0}",
        ]
        return "\n".join(lines) + "\n"


def _summary_from_rules(rules: Sequence, dataset: Dataset, target_class: int) -> dict:
    union = np.zeros(dataset.n_cases, dtype=bool)
    for rule in rules:
        union |= covered_mask(rule, dataset)
    correct = int(np.count_nonzero(union & dataset.class_mask(target_class)))
    covered = int(np.count_nonzero(union))
    n_target = dataset.class_count(target_class)
    return {
        "rules_selected": len(rules),
        "target_cases": n_target,
        "cases_covered": covered,
        "cases_correct": correct,
        "misclassified": covered - correct,
        "unclassified_target": n_target - correct,
        "actual_coverage_pct": 100.0 * correct / n_target if n_target else 0.0,
        "actual_precision_pct": 100.0 * correct / covered if covered else 0.0,
    }


@dataclass(frozen=True)
class _CoreResult:
    picks: tuple  # (Candidate, added_correct)
    candidates_by_group: tuple
    context: _MiningContext
    target_mask: int


def _mine_core(
    dataset: Dataset,
    groups,
    thresholds: Thresholds,
    target_class: int,
    policy: Optional[TraversalPolicy],
) -> _CoreResult:
    groups = _validate_groups(groups, dataset.n_attributes)
    ctx = _MiningContext(dataset)
    workers = max(1, int(os.environ.get("SRG_THREADS", "1")))

    def job(group):
        return generate_rules_for_group(
            group, dataset, target_class, thresholds, policy=policy, context=ctx
        )

    if workers > 1:
        # groups are independent; results are reduced in group order
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_group = list(pool.map(job, groups))
    else:
        per_group = [job(g) for g in groups]

    seen = set()
    pool_cands = []
    for cands in per_group:
        for c in cands:
            key = (c.rule.target_class, c.rule.sort_key)
            if key not in seen:
                seen.add(key)
                pool_cands.append(c)
    ordered = sorted(pool_cands, key=lambda c: (-c.n_covered, -c.precision, c.rule.sort_key))

    # Coverage-ordered walk. The first admitted rule is the dominant one and
    # may carry misclassifications; every later rule must add at least one
    # new correctly covered class case without adding any misclassified case
    # beyond those already committed, so all errors stay attributable to the
    # dominant rule(s) actually selected.
    target_mask = ctx.class_masks.get(target_class, 0)
    off_target = ctx.full ^ target_mask
    covered = 0
    committed_mis = 0
    picks = []
    for cand in ordered:
        correct = cand.mask & target_mask
        gain = (correct & ~covered).bit_count()
        if gain == 0:
            continue
        mis = cand.mask & off_target
        if picks and (mis & ~committed_mis):
            continue
        picks.append((cand, gain))
        covered |= correct
        committed_mis |= mis
        if covered == target_mask:
            break

    candidates_by_group = tuple(
        (g, tuple(c.rule for c in cands)) for g, cands in zip(groups, per_group)
    )
    return _CoreResult(tuple(picks), candidates_by_group, ctx, target_mask)


def _selected_from_picks(picks, dataset) -> tuple:
    out = []
    for cand, gain in picks:
        out.append(SelectedRule(cand.rule, rule_metrics(cand.rule, dataset), cand.group, gain))
    return tuple(out)


def _pairwise_overlap(selected: Sequence[SelectedRule], dataset: Dataset, target_class: int) -> tuple:
    report = []
    for i in range(len(selected)):
        for j in range(i + 1, len(selected)):
            ov = overlap(selected[i].rule, selected[j].rule, dataset, target_class)
            report.append(
                {
                    "first": i + 1,
                    "second": j + 1,
                    "overlap_cases": ov.overlap_cases,
                    "union_cases": ov.union_cases,
                    "overlap_pct": ov.overlap_pct,
                    "added_cases": ov.added_cases,
                    "added_pct": ov.added_pct,
                }
            )
    return tuple(report)


def _mine(dataset, groups, thresholds, target_class, algorithm, policy=None, seed=None,
          with_overlap=True) -> MiningResult:
    core = _mine_core(dataset, groups, thresholds, target_class, policy)
    selected = _selected_from_picks(core.picks, dataset)
    rules = tuple(sr.rule for sr in selected)
    result = MiningResult(
        algorithm=algorithm,
        target_class=target_class,
        target_class_name=dataset.class_names.get(target_class, f"C{target_class}"),
        thresholds=thresholds,
        groups=_validate_groups(groups, dataset.n_attributes),
        rules=selected,
        summary=_summary_from_rules(rules, dataset, target_class),
        overlap_report=_pairwise_overlap(selected, dataset, target_class) if with_overlap else (),
        candidates_by_group=core.candidates_by_group,
        seed=seed,
    )
    return result


def srg0(dataset: Dataset, groups, *, min_coverage=Fraction(1, 200), target_class: int = 1,
         policy: Optional[TraversalPolicy] = None) -> MiningResult:
    """Coverage-sorted selection of 100 percent precision rules."""
    thresholds = Thresholds(Fraction(1), _to_fraction(min_coverage))
    return _mine(dataset, groups, thresholds, target_class, "srg0", policy, with_overlap=False)


def srg1(dataset: Dataset, groups, thresholds: Thresholds, *, target_class: int = 1,
         policy: Optional[TraversalPolicy] = None) -> MiningResult:
    """Coverage-sorted selection admitting rules that add new class cases,
    with a pairwise overlap report for the selected set."""
    return _mine(dataset, groups, thresholds, target_class, "srg1", policy)


def srg2(
    dataset: Dataset,
    thresholds: Thresholds,
    *,
    prior_result: Optional[MiningResult] = None,
    groups=None,
    target_class: int = 1,
    policy: Optional[TraversalPolicy] = None,
    regroup_size: int = 4,
    frequency_threshold: float = 0.5,
    complementary_attrs: int = 2,
) -> MiningResult:
    """Mining over the most frequent attributes with complementary repair.

    Groups come either from a prior run (attributes in at least half of a
    group's rules, sorted by frequency, regrouped in blocks of regroup_size)
    or are given explicitly. Misclassified cases left by the selected rules
    are then attacked with opposite-class rules built from the first
    `complementary_attrs` attributes of the first group, under two
    requirements: cover at least one misclassified case and cover no target
    class case. Imprecise rules are replaced by their combined form.
    """
    if len(dataset.class_ids) != 2:
        raise ValidationError("complementary repair needs a two-class dataset")
    if groups is None:
        if prior_result is None:
            raise ValidationError("srg2 needs either explicit groups or a prior result")
        rules_by_group = [rules for _, rules in prior_result.candidates_by_group]
        attrs = most_frequent_attributes(rules_by_group, frequency_threshold)
        if not attrs:
            raise ValidationError("no attribute passes the frequency threshold")
        groups = _chunk_absorb(attrs, regroup_size)
    groups = _validate_groups(groups, dataset.n_attributes)

    core = _mine_core(dataset, groups, thresholds, target_class, policy)
    selected = _selected_from_picks(core.picks, dataset)
    ctx = core.context
    target_mask = core.target_mask

    union = 0
    for cand, _ in core.picks:
        union |= cand.mask
    mis_mask = union & (ctx.full ^ target_mask)
    misclassified_before = mis_mask.bit_count()

    other_class = next(c for c in dataset.class_ids if c != target_class)
    comp_selected = []
    comp_rules = []
    if mis_mask:
        pool_attrs = tuple(groups[0][:complementary_attrs])
        comp_floor = thresholds.coverage_floor(dataset.class_count(other_class))
        comp_candidates = []
        for vector in sorted(_all_vectors(len(pool_attrs)), key=lambda v: (sum(v), v)):
            sub = tuple(a for a, bit in zip(pool_attrs, vector) if bit)
            if not sub:
                continue
            options = {a: ctx.options(a, thresholds.min_coverage) for a in sub}

            def walk(i, word, clauses):
                if word & mis_mask == 0:  # requirement 1 is monotone, cut early
                    return
                if i == len(sub):
                    if word & target_mask:  # requirement 2: no target class case
                        return
                    if word.bit_count() < comp_floor:
                        return
                    rule = Rule(tuple(clauses), other_class)
                    comp_candidates.append(
                        ((mis_mask & word).bit_count(), word.bit_count(), rule, word)
                    )
                    return
                for clause, m in options[sub[i]]:
                    clauses.append(clause)
                    walk(i + 1, word & m, clauses)
                    clauses.pop()

            walk(0, ctx.full, [])
        # most repaired cases first; among ties prefer the tightest rule
        comp_candidates.sort(key=lambda t: (-t[0], t[1], t[2].sort_key))
        covered = 0
        n_other = dataset.class_count(other_class)
        for mis_cov, n_cov, rule, word in comp_candidates:
            gain = (word & mis_mask & ~covered).bit_count()
            if gain == 0:
                continue
            comp_rules.append(rule)
            comp_selected.append(
                SelectedRule(rule, rule_metrics(rule, dataset), tuple(pool_attrs), gain)
            )
            covered |= word & mis_mask
            if covered == mis_mask:
                break

    final = []
    for cand, _ in core.picks:
        if comp_rules and (cand.mask & mis_mask):
            final.append(CombinedRule(cand.rule, tuple(comp_rules)))
        else:
            final.append(cand.rule)
    final = tuple(final)

    summary = _summary_from_rules(final, dataset, target_class)
    summary["misclassified_before_repair"] = misclassified_before
    summary["precision_improved"] = bool(comp_rules) and summary["misclassified"] < misclassified_before
    if misclassified_before and not comp_rules:
        summary["note"] = "precision not improved: no complementary rule met the requirements"

    return MiningResult(
        algorithm="srg2",
        target_class=target_class,
        target_class_name=dataset.class_names.get(target_class, f"C{target_class}"),
        thresholds=thresholds,
        groups=groups,
        rules=selected,
        summary=summary,
        complementary=tuple(comp_selected),
        final_rules=final,
        overlap_report=_pairwise_overlap(selected, dataset, target_class),
        candidates_by_group=core.candidates_by_group,
    )


def srg3(
    dataset: Dataset,
    thresholds: Thresholds,
    *,
    count: int = 30,
    size: int = 3,
    seed: int = 0,
    base: str = "srg1",
    target_class: int = 1,
    policy: Optional[TraversalPolicy] = None,
) -> MiningResult:
    """Mining over randomly drawn attribute groups (seeded, reproducible)."""
    strategy = GroupingStrategy("random", size=size, count=count, seed=seed)
    groups = form_groups(strategy, dataset.n_attributes)
    if base == "srg1":
        result = _mine(dataset, groups, thresholds, target_class, "srg3", policy, seed=seed)
    elif base == "srg2":
        result = srg2(dataset, thresholds, groups=groups, target_class=target_class, policy=policy)
        result.algorithm = "srg3"
        result.seed = seed
    else:
        raise ValidationError(f"srg3 base must be srg1 or srg2, got {base!r}")
    scores = {}
    for _, rules in result.candidates_by_group:
        if not rules:
            continue
        counts = {}
        for rule in rules:
            for attr in rule.attributes:
                counts[attr] = counts.get(attr, 0) + 1
        for attr, cnt in counts.items():
            frac = Fraction(cnt, len(rules))
            if attr not in scores or frac > scores[attr]:
                scores[attr] = frac
    result.attribute_frequency = {a: float(s) for a, s in sorted(scores.items())}
    return result


def srg4(dataset: Dataset, groups, thresholds: Thresholds, *, target_class: int = 1,
         policy: Optional[TraversalPolicy] = None) -> MiningResult:
    """Mining over expert-provided attribute groups."""
    result = _mine(dataset, groups, thresholds, target_class, "srg4", policy)
    return result


def srg5(
    dataset: Dataset,
    attributes: Sequence[int],
    thresholds: Thresholds,
    *,
    target_class: int = 1,
    split: int = 3,
    groups=None,
    policy: Optional[TraversalPolicy] = None,
) -> MiningResult:
    """Mining over previously successful attributes, split into groups to
    bound the search (explicit groups override the split)."""
    if groups is None:
        groups = _chunk_absorb(tuple(int(a) for a in attributes), split)
    result = _mine(dataset, groups, thresholds, target_class, "srg5", policy)
    return result


# --- configuration and dispatch ----------------------------------------------


@dataclass(frozen=True)
class MinerConfig:
    algorithm: str
    grouping: GroupingStrategy
    thresholds: Thresholds
    seed: Optional[int] = None
    target_class: int = 1

    def to_document(self) -> dict:
        g = self.grouping
        grouping = {"kind": g.kind}
        if g.kind in ("sequential", "prior", "most_frequent"):
            grouping["size"] = g.size
        if g.kind == "random":
            grouping["count"] = g.count
            grouping["size"] = g.size
            grouping["seed"] = g.seed
        if g.kind == "expert":
            grouping["groups"] = [list(x) for x in g.groups]
        if g.kind == "prior":
            grouping["attributes"] = list(g.attributes)
        if g.kind == "most_frequent":
            grouping["threshold"] = g.threshold
        return {
            "algorithm": self.algorithm,
            "grouping": grouping,
            "thresholds": {
                "precision": float(self.thresholds.min_precision),
                "coverage": float(self.thresholds.min_coverage),
            },
            "seed": self.seed,
            "target_class": self.target_class,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2) + "\n"


def config_from_document(doc: dict) -> MinerConfig:
    try:
        algorithm = doc["algorithm"]
        g = doc.get("grouping", {"kind": "sequential", "size": 3})
        grouping = GroupingStrategy(
            kind=g["kind"],
            size=int(g.get("size", 3)),
            count=int(g.get("count", 30)),
            seed=g.get("seed"),
            groups=tuple(tuple(x) for x in g.get("groups", ())),
            attributes=tuple(g.get("attributes", ())),
            threshold=float(g.get("threshold", 0.5)),
        )
        t = doc.get("thresholds", {})
        thresholds = Thresholds(
            _to_fraction(t.get("precision", 1.0)), _to_fraction(t.get("coverage", 0.005))
        )
        return MinerConfig(
            algorithm=algorithm,
            grouping=grouping,
            thresholds=thresholds,
            seed=doc.get("seed"),
            target_class=int(doc.get("target_class", 1)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed miner config: {exc}") from None


def run_miner(config: MinerConfig, dataset: Dataset) -> MiningResult:
    """Dispatch a MinerConfig to the matching algorithm."""
    algo = config.algorithm
    if algo == "srg3":
        if config.grouping.kind != "random":
            raise ValidationError("srg3 needs a random grouping")
        return srg3(
            dataset,
            config.thresholds,
            count=config.grouping.count,
            size=config.grouping.size,
            seed=config.grouping.seed if config.grouping.seed is not None else (config.seed or 0),
            target_class=config.target_class,
        )
    groups = form_groups(config.grouping, dataset.n_attributes)
    if algo == "srg0":
        return srg0(dataset, groups, min_coverage=config.thresholds.min_coverage,
                    target_class=config.target_class)
    if algo == "srg1":
        return srg1(dataset, groups, config.thresholds, target_class=config.target_class)
    if algo == "srg2":
        return srg2(dataset, config.thresholds, groups=groups, target_class=config.target_class)
    if algo == "srg4":
        return srg4(dataset, groups, config.thresholds, target_class=config.target_class)
    if algo == "srg5":
        return srg5(dataset, (), config.thresholds, groups=groups,
                    target_class=config.target_class)
    raise ValidationError(f"unknown algorithm {algo!r}")


# --- cross validation --------------------------------------------------------


@dataclass(frozen=True)
class FoldReport:
    fold: int
    validation_cases: int
    correct: int
    misclassified: int
    total_classified: int
    rules_per_class: dict

    def as_dict(self) -> dict:
        return {
            "fold": self.fold,
            "validation_cases": self.validation_cases,
            "correct": self.correct,
            "misclassified": self.misclassified,
            "total_classified": self.total_classified,
            "rules_per_class": {str(k): v for k, v in sorted(self.rules_per_class.items())},
        }


@dataclass(frozen=True)
class CVReport:
    k: int
    seed: int
    stratified: bool
    folds: tuple

    @property
    def total_misclassified(self) -> int:
        return sum(f.misclassified for f in self.folds)

    def to_document(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "stratified": self.stratified,
            "folds": [f.as_dict() for f in self.folds],
            "total_misclassified": self.total_misclassified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2) + "\n"

    def report(self) -> str:
        lines = [f"{self.k}-fold cross validation (seed {self.seed}, "
                 f"{'stratified' if self.stratified else 'plain random'} folds)"]
        for f in self.folds:
            rules = ", ".join(f"C{k}: {v}" for k, v in sorted(f.rules_per_class.items()))
            lines.append(
                f"  fold {f.fold}: validation cases {f.validation_cases}, "
                f"classified {f.total_classified}, correct {f.correct}, "
                f"misclassified {f.misclassified}, rules {rules}"
            )
        lines.append(f"Total misclassified: {self.total_misclassified}")
        return "\n".join(lines) + "\n"


def make_folds(labels: np.ndarray, k: int, seed: int = 0, stratified: bool = True) -> list:
    """Partition case indices into k folds.

    Stratified mode deals each class separately and hands per-class
    remainders to the currently smallest folds, keeping fold sizes within
    one case of each other. Plain mode shuffles everything once.
    """
    if k < 2:
        raise ValidationError(f"k must be >= 2, got {k}")
    n = int(labels.shape[0])
    if n < k:
        raise ValidationError(f"cannot make {k} folds from {n} cases")
    rng = random.Random(seed)
    members = [[] for _ in range(k)]
    if stratified:
        totals = [0] * k
        for cls in sorted(set(labels.tolist())):
            idxs = np.flatnonzero(labels == cls).tolist()
            rng.shuffle(idxs)
            base, rem = divmod(len(idxs), k)
            order = sorted(range(k), key=lambda f: (totals[f], f))
            sizes = [base] * k
            for f in order[:rem]:
                sizes[f] += 1
            pos = 0
            for f in range(k):
                members[f].extend(idxs[pos:pos + sizes[f]])
                totals[f] += sizes[f]
                pos += sizes[f]
    else:
        idxs = list(range(n))
        rng.shuffle(idxs)
        base, rem = divmod(n, k)
        pos = 0
        for f in range(k):
            size = base + (1 if f < rem else 0)
            members[f].extend(idxs[pos:pos + size])
            pos += size
    return [np.array(sorted(m), dtype=np.int64) for m in members]


def kfold_cv(dataset: Dataset, config: MinerConfig, *, k: int = 10, seed: int = 0,
             stratified: bool = True) -> CVReport:
    """Train the configured miner on k-1 folds, score rules on the held-out
    fold, per fold. Cases covered by no rule stay unclassified."""
    folds = make_folds(dataset.class_labels, k, seed=seed, stratified=stratified)
    target = config.target_class
    other_ids = [c for c in dataset.class_ids if c != target]
    reports = []
    all_idx = np.arange(dataset.n_cases)
    for i, val_idx in enumerate(folds):
        train_mask = np.ones(dataset.n_cases, dtype=bool)
        train_mask[val_idx] = False
        train_ds = dataset.subset(all_idx[train_mask])
        val_ds = dataset.subset(val_idx)
        result = run_miner(config, train_ds)
        rules = result.ruleset
        union = np.zeros(val_ds.n_cases, dtype=bool)
        for rule in rules:
            union |= covered_mask(rule, val_ds)
        correct = int(np.count_nonzero(union & val_ds.class_mask(target)))
        classified = int(np.count_nonzero(union))
        per_class = {target: len(rules)}
        for c in other_ids:
            per_class[c] = 0
        reports.append(
            FoldReport(
                fold=i + 1,
                validation_cases=val_ds.n_cases,
                correct=correct,
                misclassified=classified - correct,
                total_classified=classified,
                rules_per_class=per_class,
            )
        )
    return CVReport(k=k, seed=seed, stratified=stratified, folds=tuple(reports))
