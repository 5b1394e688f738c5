#!/usr/bin/env python3
"""Mine the mushroom data three ways and print the resulting rule tables.

Runs the plain sequential pass (srg0), the pruned sequential pass (srg1),
and the expert-grouped pass with complementary repair (srg2), then prints
each report plus the pairwise overlap table and set complexity of the
srg1 rules.
"""

import argparse
import json
from pathlib import Path

from artifact.mushroom import load_mushroom
from artifact.rule_engine import complexity, overlap
from artifact.srg_miner import GroupingStrategy, MinerConfig, Thresholds, run_miner

EXPERT_GROUPS = ((9, 5, 7, 11), (13, 14, 15, 6), (1, 2, 4, 21, 22))


def mine(dataset, algorithm, grouping, precision, coverage):
    config = MinerConfig(
        algorithm=algorithm,
        grouping=grouping,
        thresholds=Thresholds(precision, coverage),
        seed=0,
        target_class=1,
    )
    return run_miner(config, dataset)


def overlap_table(result, dataset):
    rules = [sr.rule for sr in result.rules]
    lines = []
    for i, r1 in enumerate(rules):
        for j in range(i + 1, len(rules)):
            res = overlap(r1, rules[j], dataset)
            lines.append(
                f"R{i + 1} vs R{j + 1}: union {res.union_cases} "
                f"overlap {res.overlap_cases} ({res.overlap_pct:.2f}%) "
                f"added {res.added_cases}"
            )
    return "\n".join(lines)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default="data/agaricus-lepiota.data")
    parser.add_argument("--out-dir", default=None, help="write result JSON files here")
    args = parser.parse_args()

    dataset = load_mushroom(args.data)
    sequential = GroupingStrategy(kind="sequential", size=3)
    runs = {
        "srg0": mine(dataset, "srg0", sequential, 1.0, 0.005),
        "srg1": mine(dataset, "srg1", sequential, 1.0, 0.005),
        "srg2": mine(
            dataset, "srg2",
            GroupingStrategy(kind="expert", groups=EXPERT_GROUPS),
            0.95, 0.005,
        ),
    }

    for name, result in runs.items():
        print(f"=== {name} " + "=" * (68 - len(name)))
        print(result.report())

    print("=== srg1 pairwise overlap " + "=" * 47)
    print(overlap_table(runs["srg1"], dataset))
    ruleset = [sr.rule for sr in runs["srg1"].rules]
    print()
    print(f"srg1 set complexity (independent): {complexity(ruleset, dataset)}")
    print(f"srg1 set complexity (distinct):    {complexity(ruleset, dataset, 'distinct')}")

    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, result in runs.items():
            (out / f"{name}.json").write_text(result.to_json())
        print(f"\nwrote {', '.join(sorted(runs))} JSON to {out}")


if __name__ == "__main__":
    main()
