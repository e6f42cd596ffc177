#!/usr/bin/env python3
"""Run the desk-scale ablation matrix and print a per-variant summary.

Equivalent to `dphr experiment --config configs/ablation.cfg`; kept as a
script so the matrix is easy to tweak in code.

Usage:
    python scripts/run_ablation.py [--out runs/ablation] [--seeds 10]
"""

import argparse
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dphr import ExperimentConfig, SynthConfig, TrainConfig
from dphr.experiment import run_experiment


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("runs/ablation"))
    parser.add_argument("--seeds", type=int, default=10, help="number of seeds (0..n-1)")
    parser.add_argument("--epochs", type=int, default=50)
    args = parser.parse_args()

    cfg = ExperimentConfig(
        synth=SynthConfig(n_classes=32, dim=16, hard_pair_fraction=0.5),
        train=TrainConfig(mode="free-embedding", normalize=False, epochs=args.epochs),
        variants=("baseline", "rda-only", "palw-only", "dphr"),
        seeds=tuple(range(args.seeds)),
    )
    rows = run_experiment(cfg, args.out)

    by_variant = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row.status == "ok":
            by_variant[row.variant][row.direction].append((row.r_at_1, row.ap))

    print(f"\n{'variant':12s} {'dir':6s} {'R@1':>7s} {'AP':>7s}   (mean over {args.seeds} seeds)")
    for variant in cfg.variants:
        for direction in ("a_to_b", "b_to_a"):
            vals = by_variant[variant][direction]
            if not vals:
                print(f"{variant:12s} {direction:6s} {'----':>7s} {'----':>7s}")
                continue
            r1 = np.mean([v[0] for v in vals])
            ap = np.mean([v[1] for v in vals])
            print(f"{variant:12s} {direction:6s} {r1:7.2f} {ap:7.2f}")
    print(f"\noutputs in {args.out}/ (summary.csv, trace_*.csv, *.svg)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
