"""Plain-SGD training loop over the synthetic benchmark.

Two parameterizations: free-embedding, where the embedding matrices are
the parameters themselves, and linear-encoder, where a single projection
matrix shared by both views is learned on top of the fixed data points.
Variants toggle the two reweighting mechanisms independently so ablation
runs differ by exactly one mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, ValidationError
from .gradients import GradPair, dphr_objective_with_grads
from .hardness import DEFAULT_W_MAX, DEFAULT_W_MIN, gap_clip_weights
from .scheduler import PalwConfig, PalwState, PalwTrace, palw_step
from .synthetic import SynthDataset
from .tensor_ops import EmbeddingBatch, l2_normalize
from .triplet import DEFAULT_MARGIN, bidirectional_triplet_loss

VARIANTS = ("baseline", "rda-only", "palw-only", "dphr", "her-clip")
MODES = ("free-embedding", "linear-encoder")


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings for one run."""

    mode: str = "free-embedding"
    lr: float = 0.2
    epochs: int = 50
    batch_size: int = 8
    margin: float = DEFAULT_MARGIN
    w_min: float = DEFAULT_W_MIN
    w_max: float = DEFAULT_W_MAX
    palw: PalwConfig = field(default_factory=PalwConfig)
    variant: str = "dphr"
    normalize: bool = True
    direction: str = "both"
    seed: int = 0
    her_scale: float = 1.0
    her_clip: float = 2.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.variant not in VARIANTS:
            raise ValidationError(f"variant must be one of {VARIANTS}")
        if self.lr < 0:
            raise ValidationError("lr must be non-negative")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.batch_size < 2:
            raise ValidationError("batch_size must be >= 2")


@dataclass(frozen=True)
class RunRecord:
    """Telemetry for one training iteration.

    Fields not produced by the variant stay None: baseline logs no
    weighted term, and only scheduler-driven variants log the alpha and
    lambda columns.
    """

    t: int
    epoch: int
    l_tri: float
    l_wtri: float | None
    alpha: float | None
    alpha_hat: float | None
    lambda_inst: float | None
    lambda_value: float | None
    grad_norm: float


@dataclass
class TrainResult:
    """Final parameters plus per-iteration telemetry."""

    emb_a: np.ndarray
    emb_b: np.ndarray
    ids: np.ndarray
    records: list[RunRecord]
    mode: str
    projection: np.ndarray | None = None


def _iter_batches(rng: np.random.Generator, n: int, batch_size: int):
    """Yield index chunks of one shuffled epoch; a trailing chunk of a
    single class is dropped since it admits no negatives."""
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        chunk = order[start : start + batch_size]
        if len(chunk) >= 2:
            yield chunk


def _unweighted_loss(batch: EmbeddingBatch, cfg: TrainConfig) -> float:
    """Forward-only unweighted triplet loss, the scheduler's progress input."""
    if cfg.normalize:
        batch = EmbeddingBatch(
            l2_normalize(batch.view_a), l2_normalize(batch.view_b), batch.ids
        )
    loss, _, _ = bidirectional_triplet_loss(batch, cfg.margin, cfg.direction)
    return loss


def _variant_losses(
    batch: EmbeddingBatch, cfg: TrainConfig, scheduler: PalwState | None, t: int
) -> tuple[float, float, float | None, float | None, GradPair, PalwTrace | None]:
    """Dispatch one forward/backward pass for the configured variant.

    Returns (objective, l_tri, l_wtri, lambda_t, grads, palw_trace).
    """
    common = dict(
        margin=cfg.margin,
        normalize=cfg.normalize,
        direction=cfg.direction,
    )
    if cfg.variant == "baseline":
        parts = dphr_objective_with_grads(batch, lambda_t=0.0, **common)
        return parts.loss, parts.l_tri, None, None, parts.grads, None

    if cfg.variant == "rda-only":
        parts = dphr_objective_with_grads(
            batch, w_min=cfg.w_min, w_max=cfg.w_max, lambda_t=1.0, **common
        )
        return parts.loss, parts.l_tri, parts.l_wtri, None, parts.grads, None

    if cfg.variant == "her-clip":
        weight_fn = lambda tg, _d: gap_clip_weights(tg, cfg.her_scale, cfg.her_clip)
        parts = dphr_objective_with_grads(
            batch, lambda_t=1.0, weight_fn=weight_fn, **common
        )
        return parts.loss, parts.l_tri, parts.l_wtri, None, parts.grads, None

    # Scheduler-driven variants: the progress signal is the unweighted
    # loss of the current iteration, so run a forward-only pass first.
    probe = _unweighted_loss(batch, cfg)
    if not np.isfinite(probe):
        raise DivergenceError(t)
    lambda_t, trace = palw_step(scheduler, probe)
    if cfg.variant == "palw-only":
        parts = dphr_objective_with_grads(
            batch, w_min=1.0, w_max=1.0, lambda_t=lambda_t, **common
        )
    else:  # dphr
        parts = dphr_objective_with_grads(
            batch, w_min=cfg.w_min, w_max=cfg.w_max, lambda_t=lambda_t, **common
        )
    return parts.loss, parts.l_tri, parts.l_wtri, lambda_t, parts.grads, trace


def train(dataset: SynthDataset, cfg: TrainConfig) -> TrainResult:
    """Run epochs of SGD and collect one RunRecord per iteration.

    Raises DivergenceError with the iteration index if the objective
    leaves the finite range.
    """
    k = dataset.n_classes
    if cfg.batch_size > k:
        raise ValidationError("batch_size cannot exceed the number of classes")

    rng = np.random.default_rng(cfg.seed)
    uses_scheduler = cfg.variant in ("palw-only", "dphr")
    scheduler = PalwState(cfg.palw) if uses_scheduler else None

    emb_a = dataset.view_a.copy()
    emb_b = dataset.view_b.copy()
    projection = None
    if cfg.mode == "linear-encoder":
        projection = np.eye(dataset.dim)

    records: list[RunRecord] = []
    t = 0
    for epoch in range(cfg.epochs):
        for idx in _iter_batches(rng, k, cfg.batch_size):
            if cfg.mode == "linear-encoder":
                enc_a = dataset.view_a @ projection
                enc_b = dataset.view_b @ projection
                batch = EmbeddingBatch(enc_a[idx], enc_b[idx], dataset.ids[idx])
            else:
                batch = EmbeddingBatch(emb_a[idx], emb_b[idx], dataset.ids[idx])

            objective, l_tri, l_wtri, lambda_t, grads, trace = _variant_losses(
                batch, cfg, scheduler, t
            )
            if not np.isfinite(objective):
                raise DivergenceError(t)

            if cfg.mode == "linear-encoder":
                # Chain rule through the shared projection: both views'
                # embedding gradients pull on the same matrix.
                grad_w = (
                    dataset.view_a[idx].T @ grads.grad_a
                    + dataset.view_b[idx].T @ grads.grad_b
                )
                projection = projection - cfg.lr * grad_w
                grad_norm = float(np.linalg.norm(grad_w))
                if not np.isfinite(projection).all():
                    raise DivergenceError(t)
            else:
                emb_a[idx] -= cfg.lr * grads.grad_a
                emb_b[idx] -= cfg.lr * grads.grad_b
                grad_norm = float(
                    np.sqrt(np.sum(grads.grad_a**2) + np.sum(grads.grad_b**2))
                )
                if not (np.isfinite(emb_a[idx]).all() and np.isfinite(emb_b[idx]).all()):
                    raise DivergenceError(t)

            records.append(
                RunRecord(
                    t=t,
                    epoch=epoch,
                    l_tri=l_tri,
                    l_wtri=l_wtri,
                    alpha=trace.alpha if trace else None,
                    alpha_hat=trace.alpha_hat if trace else None,
                    lambda_inst=trace.lambda_inst if trace else None,
                    lambda_value=trace.lambda_value if trace else None,
                    grad_norm=grad_norm,
                )
            )
            t += 1

    if cfg.mode == "linear-encoder":
        emb_a = dataset.view_a @ projection
        emb_b = dataset.view_b @ projection
    return TrainResult(
        emb_a=emb_a,
        emb_b=emb_b,
        ids=dataset.ids.copy(),
        records=records,
        mode=cfg.mode,
        projection=projection,
    )
