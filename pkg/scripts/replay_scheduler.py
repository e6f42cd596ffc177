#!/usr/bin/env python3
"""Replay the loss-weighting scheduler over a synthetic loss stream and
print the trace, for eyeballing how the coefficient responds to
different decay shapes.

Usage:
    python scripts/replay_scheduler.py --shape linear --steps 100
    python scripts/replay_scheduler.py --shape exp --steps 200 --window 32
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dphr import PalwConfig, PalwState, palw_step


def make_stream(shape: str, steps: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, steps)
    if shape == "linear":
        return 2.0 * (1.0 - t)
    if shape == "exp":
        return 2.0 * np.exp(-4.0 * t)
    if shape == "noisy":
        rng = np.random.default_rng(0)
        return np.maximum(0.0, 2.0 * (1.0 - t) + 0.2 * rng.standard_normal(steps))
    raise SystemExit(f"unknown shape {shape!r}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shape", choices=("linear", "exp", "noisy"), default="linear")
    parser.add_argument("--steps", type=int, default=100)
    parser.add_argument("--window", type=int, default=16)
    args = parser.parse_args()

    state = PalwState(PalwConfig(window=args.window))
    print(f"{'t':>4s} {'loss':>8s} {'alpha':>8s} {'a_hat':>6s} {'inst':>6s} {'lambda':>7s}")
    for loss in make_stream(args.shape, args.steps):
        lam, tr = palw_step(state, float(loss))
        print(f"{tr.t:4d} {tr.loss:8.4f} {tr.alpha:8.4f} {tr.alpha_hat:6.3f} "
              f"{tr.lambda_inst:6.3f} {lam:7.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
