#!/usr/bin/env python3
"""Moment curves for the five canonical shapes (same as `pfsdm exp1`)."""

import argparse

from pfsdm.analysis import run_experiment1
from pfsdm.config import RunConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir")
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    cfg = RunConfig(seed=args.seed)
    result = run_experiment1(args.out_dir, cfg, jobs=args.jobs)
    print(f"wrote {args.out_dir}; normalizing constants: "
          + ", ".join(f"m{k + 1}={v:.6g}" for k, v in enumerate(result['constants'].m)))


if __name__ == "__main__":
    main()
