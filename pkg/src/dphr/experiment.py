"""Experiment matrix runner and file I/O for the CLI harness.

Writes one trace CSV per (variant, seed) run, appends both retrieval
directions to summary.csv, and renders SVG plots of the mean loss and
coefficient trajectories per variant. All outputs are deterministic for
a fixed config except the wall_ms column.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .configio import ExperimentConfig
from .errors import DivergenceError, ValidationError
from .evaluation import RetrievalResult, evaluate
from .scheduler import PalwConfig, PalwState, PalwTrace, palw_step
from .synthetic import SynthDataset, generate_dataset
from .training import RunRecord, TrainResult, train

SUMMARY_HEADER = "variant,seed,direction,r_at_1,r_at_5,ap,final_loss,status,wall_ms"
TRACE_HEADER = "t,epoch,l_tri,l_wtri,alpha,alpha_hat,lambda_inst,lambda,grad_norm"
SCHEDULE_HEADER = "t,alpha,alpha_hat,lambda_inst,lambda"


def fmt_real(x: float | None) -> str:
    """Reals with 6 significant digits; None renders as an empty field."""
    return "" if x is None else f"{x:.6g}"


def fmt_pct(x: float | None) -> str:
    return "" if x is None else f"{x:.2f}"


def record_objective(rec: RunRecord) -> float:
    """Reassemble the per-iteration objective from its logged components."""
    if rec.l_wtri is None:
        return rec.l_tri
    if rec.lambda_value is None:
        return rec.l_tri + rec.l_wtri
    return rec.l_tri + rec.lambda_value * rec.l_wtri


@dataclass(frozen=True)
class SummaryRow:
    variant: str
    seed: int
    direction: str
    r_at_1: float | None
    r_at_5: float | None
    ap: float | None
    final_loss: float | None
    status: str
    wall_ms: int

    def to_csv(self) -> str:
        return ",".join(
            [
                self.variant,
                str(self.seed),
                self.direction,
                fmt_pct(self.r_at_1),
                fmt_pct(self.r_at_5),
                fmt_pct(self.ap),
                fmt_real(self.final_loss),
                self.status,
                str(self.wall_ms),
            ]
        )


def write_trace_csv(path: str | Path, records: list[RunRecord]) -> None:
    lines = [TRACE_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    str(r.t),
                    str(r.epoch),
                    fmt_real(r.l_tri),
                    fmt_real(r.l_wtri),
                    fmt_real(r.alpha),
                    fmt_real(r.alpha_hat),
                    fmt_real(r.lambda_inst),
                    fmt_real(r.lambda_value),
                    fmt_real(r.grad_norm),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary_csv(path: str | Path, rows: list[SummaryRow]) -> None:
    Path(path).write_text(
        "\n".join([SUMMARY_HEADER] + [r.to_csv() for r in rows]) + "\n"
    )


def write_dataset_csv(path: str | Path, ds: SynthDataset) -> None:
    """Long-format dump: one row per (class, view) sample."""
    dim = ds.dim
    header = "id,view," + ",".join(f"x{i}" for i in range(dim))
    lines = [header]
    for view_name, mat in (("a", ds.view_a), ("b", ds.view_b)):
        for cid, row in zip(ds.ids, mat):
            lines.append(f"{cid},{view_name}," + ",".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_embeddings_csv(path: str | Path, result: TrainResult) -> None:
    dim = result.emb_a.shape[1]
    header = "id,view," + ",".join(f"x{i}" for i in range(dim))
    lines = [header]
    for view_name, mat in (("a", result.emb_a), ("b", result.emb_b)):
        for cid, row in zip(result.ids, mat):
            lines.append(f"{cid},{view_name}," + ",".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_embeddings_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Read a dataset/embeddings CSV back into (ids, view_a, view_b, ids_b)."""
    rows_a: list[list[float]] = []
    rows_b: list[list[float]] = []
    ids_a: list[int] = []
    ids_b: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["id", "view"]:
            raise ValidationError(f"{path}: expected an 'id,view,x0,...' header")
        for line in reader:
            cid, view = int(line[0]), line[1]
            coords = [float(v) for v in line[2:]]
            if view == "a":
                ids_a.append(cid)
                rows_a.append(coords)
            elif view == "b":
                ids_b.append(cid)
                rows_b.append(coords)
            else:
                raise ValidationError(f"{path}: unknown view {view!r}")
    if not rows_a or not rows_b:
        raise ValidationError(f"{path}: need samples for both views")
    return np.array(ids_a), np.array(rows_a), np.array(rows_b), np.array(ids_b)


def evaluate_both_directions(
    emb_a: np.ndarray,
    emb_b: np.ndarray,
    ids_a: np.ndarray,
    ids_b: np.ndarray,
    ks,
) -> dict[str, RetrievalResult]:
    ks = sorted(set(ks) | {1, 5})
    return {
        "a_to_b": evaluate(emb_a, emb_b, ids_a, ids_b, ks, direction="a_to_b"),
        "b_to_a": evaluate(emb_b, emb_a, ids_b, ids_a, ks, direction="b_to_a"),
    }


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path) -> list[SummaryRow]:
    """Run the (variant x seed) matrix, writing traces, summary and plots.

    A diverging run is recorded with status=diverged and empty metric
    fields; the rest of the matrix continues.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows: list[SummaryRow] = []
    loss_series: dict[str, list[list[float]]] = {v: [] for v in cfg.variants}
    lambda_series: dict[str, list[list[float]]] = {v: [] for v in cfg.variants}

    for variant in cfg.variants:
        for seed in cfg.seeds:
            t0 = time.perf_counter()
            dataset = generate_dataset(replace(cfg.synth, seed=seed))
            tcfg = replace(cfg.train, variant=variant, seed=seed)
            try:
                result = train(dataset, tcfg)
            except DivergenceError:
                wall_ms = int(1000 * (time.perf_counter() - t0))
                for direction in ("a_to_b", "b_to_a"):
                    rows.append(
                        SummaryRow(variant, seed, direction, None, None, None, None, "diverged", wall_ms)
                    )
                continue

            write_trace_csv(out / f"trace_{variant}_{seed}.csv", result.records)
            loss_series[variant].append([record_objective(r) for r in result.records])
            if any(r.lambda_value is not None for r in result.records):
                lambda_series[variant].append(
                    [r.lambda_value for r in result.records if r.lambda_value is not None]
                )

            metrics = evaluate_both_directions(
                result.emb_a, result.emb_b, result.ids, result.ids, cfg.ks
            )
            final_loss = record_objective(result.records[-1]) if result.records else None
            wall_ms = int(1000 * (time.perf_counter() - t0))
            for direction in ("a_to_b", "b_to_a"):
                res = metrics[direction]
                rows.append(
                    SummaryRow(
                        variant,
                        seed,
                        direction,
                        res.recall_at[1],
                        res.recall_at[5],
                        res.ap,
                        final_loss,
                        "ok",
                        wall_ms,
                    )
                )

    write_summary_csv(out / "summary.csv", rows)
    _write_mean_plots(out, loss_series, lambda_series)
    return rows


def _mean_series(runs: list[list[float]]) -> list[float]:
    if not runs:
        return []
    n = min(len(r) for r in runs)
    stacked = np.array([r[:n] for r in runs])
    return list(stacked.mean(axis=0))


def _write_mean_plots(out: Path, loss_series, lambda_series) -> None:
    from .svgplot import write_line_plot

    losses = {v: _mean_series(runs) for v, runs in loss_series.items() if runs}
    if losses:
        write_line_plot(out / "loss_vs_t.svg", losses, "Training objective (mean over seeds)", "loss")
    lambdas = {v: _mean_series(runs) for v, runs in lambda_series.items() if runs}
    if lambdas:
        write_line_plot(out / "lambda_vs_t.svg", lambdas, "Loss coefficient (mean over seeds)", "lambda")


def schedule_trace_from_lines(lines, cfg: PalwConfig) -> list[PalwTrace]:
    """Replay the scheduler over a loss stream, one value per line.

    Blank lines are ignored; anything unparsable or negative reports its
    line number.
    """
    state = PalwState(cfg)
    traces: list[PalwTrace] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            value = float(stripped)
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: not a number: {stripped!r}") from exc
        if not np.isfinite(value) or value < 0:
            raise ValidationError(f"line {lineno}: loss must be finite and non-negative")
        _, trace = palw_step(state, value)
        traces.append(trace)
    return traces


def write_schedule_trace_csv(path: str | Path, traces: list[PalwTrace]) -> None:
    lines = [SCHEDULE_HEADER]
    for tr in traces:
        lines.append(
            ",".join(
                [
                    str(tr.t),
                    fmt_real(tr.alpha),
                    fmt_real(tr.alpha_hat),
                    fmt_real(tr.lambda_inst),
                    fmt_real(tr.lambda_value),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")
