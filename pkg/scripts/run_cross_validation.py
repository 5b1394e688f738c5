#!/usr/bin/env python3
"""K-fold cross-validation of the sequential miner on the mushroom data."""

import argparse

from artifact.mushroom import load_mushroom
from artifact.srg_miner import GroupingStrategy, MinerConfig, Thresholds, kfold_cv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default="data/agaricus-lepiota.data")
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--precision", type=float, default=0.95)
    parser.add_argument("--coverage", type=float, default=0.005)
    parser.add_argument("--group-size", type=int, default=3)
    parser.add_argument("--no-stratify", action="store_true")
    args = parser.parse_args()

    dataset = load_mushroom(args.data)
    config = MinerConfig(
        algorithm="srg1",
        grouping=GroupingStrategy(kind="sequential", size=args.group_size),
        thresholds=Thresholds(args.precision, args.coverage),
        seed=args.seed,
        target_class=1,
    )
    report = kfold_cv(
        dataset, config, k=args.k, seed=args.seed, stratified=not args.no_stratify
    )
    print(report.report())


if __name__ == "__main__":
    main()
