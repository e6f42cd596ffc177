"""Max-margin triplet loss over in-batch cross-view negatives.

A batch of B paired embeddings yields B queries, each with one positive
(the paired row of the other view) and B-1 negatives (the remaining rows
of that view). Negatives are ordered by ascending gallery index so that
loss and weight matrices align deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BatchTooSmallError, DimensionError, ValidationError
from .tensor_ops import EmbeddingBatch, pairwise_sq_euclidean

DEFAULT_MARGIN = 0.3

Direction = str  # one of "a_to_b", "b_to_a", "both"
DIRECTIONS = ("a_to_b", "b_to_a", "both")


@dataclass(frozen=True)
class TripletGeometry:
    """Per-(query, negative) distances and hinge losses for one direction.

    ``neg_dist[i]`` lists the squared distances from query i to the B-1
    gallery rows j != i, in ascending j. ``losses`` holds
    max(0, pos_dist[i] - neg_dist[i,k] + margin) entrywise.
    """

    pos_dist: np.ndarray   # (B,)
    neg_dist: np.ndarray   # (B, B-1)
    margin: float
    losses: np.ndarray     # (B, B-1)

    @property
    def batch_size(self) -> int:
        return self.pos_dist.shape[0]


def build_triplets(dm: np.ndarray, margin: float) -> TripletGeometry:
    """Split a square distance matrix into positive/negative parts and
    evaluate the hinge loss for every triplet."""
    dm = np.asarray(dm, dtype=np.float64)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise DimensionError(f"distance matrix must be square, got {dm.shape}")
    b = dm.shape[0]
    if b < 2:
        raise BatchTooSmallError("need at least 2 rows to form triplets")
    if margin < 0:
        raise ValidationError("margin must be non-negative")
    pos = np.diagonal(dm).copy()
    off_mask = ~np.eye(b, dtype=bool)
    neg = dm[off_mask].reshape(b, b - 1)
    losses = np.maximum(0.0, pos[:, None] - neg + margin)
    return TripletGeometry(pos_dist=pos, neg_dist=neg, margin=float(margin), losses=losses)


def mean_triplet_loss(tg: TripletGeometry) -> float:
    """Average hinge loss over all B(B-1) triplets."""
    return float(np.mean(tg.losses))


def bidirectional_triplet_loss(
    batch: EmbeddingBatch,
    margin: float = DEFAULT_MARGIN,
    direction: Direction = "both",
) -> tuple[float, TripletGeometry, TripletGeometry]:
    """Triplet loss with view a as queries, view b as queries, or both.

    Returns the scalar loss for the requested direction ("both" averages
    the two) together with both directional geometries.
    """
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}")
    tg_ab = build_triplets(pairwise_sq_euclidean(batch.view_a, batch.view_b), margin)
    tg_ba = build_triplets(pairwise_sq_euclidean(batch.view_b, batch.view_a), margin)
    if direction == "a_to_b":
        loss = mean_triplet_loss(tg_ab)
    elif direction == "b_to_a":
        loss = mean_triplet_loss(tg_ba)
    else:
        loss = 0.5 * (mean_triplet_loss(tg_ab) + mean_triplet_loss(tg_ba))
    return loss, tg_ab, tg_ba
