"""Command-line harness.

Subcommands: generate, train, eval, experiment, schedule-trace. Exit
codes: 0 success, 1 validation error, 2 divergence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .configio import ExperimentConfig, load_config
from .errors import DivergenceError, ValidationError
from .experiment import (
    evaluate_both_directions,
    read_embeddings_csv,
    run_experiment,
    schedule_trace_from_lines,
    write_dataset_csv,
    write_embeddings_csv,
    write_schedule_trace_csv,
    write_trace_csv,
)
from .synthetic import generate_dataset
from .training import train

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DIVERGED = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dphr",
        description="Hardness-reweighted triplet training on synthetic cross-view data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, help="flat key = value config file")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: the config's out_dir)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p_gen = sub.add_parser("generate", help="write a synthetic dataset CSV")
    add_common(p_gen)

    p_train = sub.add_parser("train", help="train one variant, write trace and embeddings")
    add_common(p_train)

    p_eval = sub.add_parser("eval", help="evaluate retrieval metrics for an embeddings CSV")
    p_eval.add_argument("embeddings", type=Path, help="embeddings CSV (id,view,x0,...)")
    add_common(p_eval)

    p_exp = sub.add_parser("experiment", help="run the full variant x seed matrix")
    add_common(p_exp)

    p_sched = sub.add_parser("schedule-trace", help="replay the loss scheduler over a loss stream")
    p_sched.add_argument("stream", type=Path, help="text file, one loss value per line")
    add_common(p_sched)

    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(
            cfg,
            synth=replace(cfg.synth, seed=args.seed),
            train=replace(cfg.train, seed=args.seed),
            seeds=(args.seed,),
        )
    if args.out is None:
        args.out = Path(cfg.out_dir)
    return cfg


def _cmd_generate(args) -> int:
    cfg = _load(args)
    args.out.mkdir(parents=True, exist_ok=True)
    ds = generate_dataset(cfg.synth)
    path = args.out / "dataset.csv"
    write_dataset_csv(path, ds)
    print(f"wrote {path} ({ds.n_classes} classes, dim {ds.dim})")
    return EXIT_OK


def _cmd_train(args) -> int:
    cfg = _load(args)
    args.out.mkdir(parents=True, exist_ok=True)
    ds = generate_dataset(cfg.synth)
    result = train(ds, cfg.train)
    tag = f"{cfg.train.variant}_{cfg.train.seed}"
    write_trace_csv(args.out / f"trace_{tag}.csv", result.records)
    write_embeddings_csv(args.out / f"embeddings_{tag}.csv", result)
    metrics = evaluate_both_directions(result.emb_a, result.emb_b, result.ids, result.ids, cfg.ks)
    for direction in ("a_to_b", "b_to_a"):
        print(metrics[direction].summary())
    return EXIT_OK


def _cmd_eval(args) -> int:
    cfg = _load(args)
    ids_a, emb_a, emb_b, ids_b = read_embeddings_csv(args.embeddings)
    metrics = evaluate_both_directions(emb_a, emb_b, ids_a, ids_b, cfg.ks)
    for direction in ("a_to_b", "b_to_a"):
        print(metrics[direction].summary())
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = _load(args)
    rows = run_experiment(cfg, args.out)
    print(f"wrote {args.out / 'summary.csv'} ({len(rows)} rows)")
    diverged = sum(1 for r in rows if r.status == "diverged")
    if diverged:
        print(f"{diverged} run rows diverged", file=sys.stderr)
    return EXIT_OK


def _cmd_schedule_trace(args) -> int:
    cfg = _load(args)
    args.out.mkdir(parents=True, exist_ok=True)
    lines = args.stream.read_text().splitlines()
    traces = schedule_trace_from_lines(lines, cfg.train.palw)
    path = args.out / "schedule_trace.csv"
    write_schedule_trace_csv(path, traces)
    print(f"wrote {path} ({len(traces)} steps)")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "experiment": _cmd_experiment,
    "schedule-trace": _cmd_schedule_trace,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
