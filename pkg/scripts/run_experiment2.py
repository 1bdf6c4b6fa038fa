#!/usr/bin/env python3
"""Augmented-corpus clustering experiment (same as `pfsdm exp2`)."""

import argparse

from pfsdm.analysis import run_experiment2
from pfsdm.config import RunConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("seed", type=int)
    parser.add_argument("out_dir")
    parser.add_argument("--jobs", type=int, default=None)
    args = parser.parse_args()
    result = run_experiment2(args.seed, args.out_dir, RunConfig(seed=args.seed), jobs=args.jobs)
    scores = result["scores"]
    medoids = result["medoids"]
    print(
        f"accuracy={scores.nearest_medoid_accuracy:.3f} "
        f"silhouette={scores.mean_silhouette:.3f} "
        f"most_distant={medoids['most_distant_class']} "
        f"closest_pair={medoids['closest_pair']}"
    )


if __name__ == "__main__":
    main()
