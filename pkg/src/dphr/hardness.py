"""Ratio-based difficulty weighting of in-batch negatives.

Each negative gets a hardness score pos / (pos + neg) in [0, 1]: the
closer a negative sits to the query relative to the positive, the higher
the score. Scores map linearly onto a weight interval, and the weighted
loss averages weight * hinge over all triplets. The ratio is invariant
under global rescaling of all distances, so weights do not drift with
feature norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .tensor_ops import NORM_EPS
from .triplet import TripletGeometry

# Weight interval endpoints used throughout unless overridden.
DEFAULT_W_MIN = 0.5
DEFAULT_W_MAX = 2.0

# Hardness assigned when both distances vanish: the limit of the ratio
# along pos == neg, i.e. a maximally ambiguous triplet. An epsilon in the
# denominator would instead push the score toward 0 and misread a
# coincident negative as easy.
DEGENERATE_SCORE = 0.5


@dataclass(frozen=True)
class HardnessWeights:
    """Scores in [0, 1] and their mapped weights in [w_min, w_max]."""

    scores: np.ndarray   # (B, B-1)
    weights: np.ndarray  # (B, B-1)
    w_min: float
    w_max: float

    @classmethod
    def from_geometry(
        cls,
        tg: TripletGeometry,
        w_min: float = DEFAULT_W_MIN,
        w_max: float = DEFAULT_W_MAX,
    ) -> "HardnessWeights":
        scores = hardness_scores(tg)
        return cls(
            scores=scores,
            weights=linear_scale(scores, w_min, w_max),
            w_min=float(w_min),
            w_max=float(w_max),
        )


def hardness_scores(tg: TripletGeometry) -> np.ndarray:
    """Per-negative hardness ratio pos / (pos + neg).

    Falls back to ``DEGENERATE_SCORE`` where the denominator is below
    ``NORM_EPS`` (positive and negative both coincide with the query).
    """
    pos = np.broadcast_to(tg.pos_dist[:, None], tg.neg_dist.shape)
    denom = pos + tg.neg_dist
    degenerate = denom < NORM_EPS
    safe = np.where(degenerate, 1.0, denom)
    return np.where(degenerate, DEGENERATE_SCORE, pos / safe)


def linear_scale(x, lo: float, hi: float):
    """Map x in [0, 1] affinely onto [lo, hi]: lo + (hi - lo) * x.

    Accepts scalars or arrays. Inputs outside [0, 1] raise; callers must
    truncate first.
    """
    if lo > hi:
        raise ValidationError(f"interval endpoints out of order: [{lo}, {hi}]")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValidationError("linear_scale input must lie in [0, 1]")
    out = lo + (hi - lo) * x
    return float(out) if out.ndim == 0 else out


def weighted_triplet_loss(tg: TripletGeometry, hw: HardnessWeights) -> float:
    """Average of weight * hinge over all B(B-1) triplets."""
    if hw.weights.shape != tg.losses.shape:
        raise DimensionError(
            f"weights shape {hw.weights.shape} does not match losses {tg.losses.shape}"
        )
    return float(np.mean(hw.weights * tg.losses))


def gap_clip_weights(tg: TripletGeometry, scale: float = 1.0, clip: float = 2.0) -> np.ndarray:
    """Gap-based weighting with a hard ceiling, for baseline comparisons.

    Weight = min(clip, 1 + scale * hinge): triplets violating the margin
    get weights growing with the violation until the ceiling flattens
    them, so the most confusing negatives all collapse to the same
    weight. Kept as a harness option only.
    """
    if clip < 1.0:
        raise ValidationError("clip ceiling must be >= 1")
    return np.minimum(clip, 1.0 + scale * tg.losses)
