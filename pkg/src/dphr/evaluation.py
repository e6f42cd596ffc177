"""Recall@K and Average Precision over embedding galleries.

Gallery items are ranked per query by ascending squared Euclidean
distance, ties broken by ascending gallery index so degenerate inputs
evaluate deterministically. AP uses the interpolation-free mean of
precision values at relevant ranks, the standard retrieval estimator of
the precision-recall area.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ValidationError
from .tensor_ops import pairwise_sq_euclidean

DEFAULT_KS = (1, 5)


@dataclass(frozen=True)
class RetrievalResult:
    """Metrics for one retrieval direction, percentages in [0, 100]."""

    recall_at: dict[int, float]
    ap: float
    direction: str
    per_query_ranks: np.ndarray  # 1-based rank of the first relevant item

    def summary(self) -> str:
        parts = [f"R@{k}={v:.2f}" for k, v in sorted(self.recall_at.items())]
        return f"[{self.direction}] " + " ".join(parts) + f" AP={self.ap:.2f}"


def evaluate(
    queries: np.ndarray,
    gallery: np.ndarray,
    query_ids: np.ndarray,
    gallery_ids: np.ndarray,
    ks: Iterable[int] = DEFAULT_KS,
    direction: str = "a_to_b",
) -> RetrievalResult:
    """Rank the gallery for every query and compute Recall@K and AP.

    Every query id must have at least one relevant gallery item.
    """
    queries = np.asarray(queries, dtype=np.float64)
    gallery = np.asarray(gallery, dtype=np.float64)
    query_ids = np.asarray(query_ids)
    gallery_ids = np.asarray(gallery_ids)
    if queries.shape[0] == 0 or gallery.shape[0] == 0:
        raise ValidationError("queries and gallery must be non-empty")
    if query_ids.shape[0] != queries.shape[0] or gallery_ids.shape[0] != gallery.shape[0]:
        raise ValidationError("id lists must match embedding row counts")
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise ValidationError("ks must contain positive integers")

    missing = [qid for qid in np.unique(query_ids) if not np.any(gallery_ids == qid)]
    if missing:
        raise ValidationError(f"queries with no relevant gallery item: {missing}")

    dists = pairwise_sq_euclidean(queries, gallery)
    n_q, n_g = dists.shape

    first_ranks = np.zeros(n_q, dtype=np.int64)
    hits_at = {k: 0 for k in ks}
    ap_sum = 0.0
    for qi in range(n_q):
        # Stable sort keeps ascending gallery index among equal distances.
        order = np.argsort(dists[qi], kind="stable")
        relevant = gallery_ids[order] == query_ids[qi]
        rel_ranks = np.flatnonzero(relevant) + 1  # 1-based
        first_ranks[qi] = rel_ranks[0]
        for k in ks:
            hits_at[k] += int(rel_ranks[0] <= k)
        precisions = np.arange(1, len(rel_ranks) + 1) / rel_ranks
        ap_sum += float(np.mean(precisions))

    recall_at = {k: 100.0 * hits_at[k] / n_q for k in ks}
    return RetrievalResult(
        recall_at=recall_at,
        ap=100.0 * ap_sum / n_q,
        direction=direction,
        per_query_ranks=first_ranks,
    )
