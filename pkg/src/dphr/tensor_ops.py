"""Dense matrix primitives: pairwise squared distances and row normalization.

Everything runs in 64-bit floats; the gradient checks downstream rely on
double precision. All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError

# Row norms below this are treated as zero (degenerate rows pass through
# normalization unchanged, and hardness ratios fall back to 1/2).
NORM_EPS = 1e-12


@dataclass(frozen=True)
class EmbeddingBatch:
    """Paired cross-view embeddings for one mini-batch.

    Row i of ``view_b`` is the positive match for row i of ``view_a``;
    every other row of the opposite view is a valid negative. Class ids
    must be pairwise distinct within the batch.
    """

    view_a: np.ndarray
    view_b: np.ndarray
    ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        a = np.asarray(self.view_a, dtype=np.float64)
        b = np.asarray(self.view_b, dtype=np.float64)
        if a.ndim != 2 or b.ndim != 2:
            raise DimensionError("embedding views must be 2-D matrices")
        if a.shape != b.shape:
            raise DimensionError(f"view shapes differ: {a.shape} vs {b.shape}")
        if a.shape[0] < 2:
            raise ValidationError("batch needs at least 2 rows")
        if a.shape[1] < 1:
            raise ValidationError("embedding dimension must be >= 1")
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise ValidationError("embeddings must be finite")
        ids = self.ids
        if ids is None:
            ids = np.arange(a.shape[0])
        ids = np.asarray(ids)
        if ids.shape != (a.shape[0],):
            raise DimensionError("ids must have one entry per batch row")
        if len(np.unique(ids)) != len(ids):
            raise ValidationError("batch ids must be pairwise distinct")
        object.__setattr__(self, "view_a", a)
        object.__setattr__(self, "view_b", b)
        object.__setattr__(self, "ids", ids)

    @property
    def batch_size(self) -> int:
        return self.view_a.shape[0]

    @property
    def dim(self) -> int:
        return self.view_a.shape[1]


def pairwise_sq_euclidean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all rows of ``a`` and ``b``.

    Returns an N x M matrix with entry (i, j) = sum_k (a[i,k] - b[j,k])^2.
    Computed via the expanded form; tiny negative round-off is clamped to
    zero so downstream ratios stay well defined. For square paired inputs
    the diagonal holds the positive-pair distances.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError("inputs must be 2-D matrices")
    if a.shape[1] != b.shape[1]:
        raise DimensionError(
            f"feature dimensions differ: {a.shape[1]} vs {b.shape[1]}"
        )
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValidationError("inputs must be finite")
    sq_a = np.sum(a * a, axis=1)[:, None]
    sq_b = np.sum(b * b, axis=1)[None, :]
    d = sq_a + sq_b - 2.0 * (a @ b.T)
    np.maximum(d, 0.0, out=d)
    return d


def l2_normalize(a: np.ndarray) -> np.ndarray:
    """Scale each row to unit Euclidean norm.

    Rows with norm below ``NORM_EPS`` are returned unchanged rather than
    divided by a near-zero value.
    """
    a = np.asarray(a, dtype=np.float64)
    if not np.isfinite(a).all():
        raise ValidationError("input must be finite")
    norms = np.linalg.norm(a, axis=-1, keepdims=True)
    safe = np.where(norms < NORM_EPS, 1.0, norms)
    return a / safe
