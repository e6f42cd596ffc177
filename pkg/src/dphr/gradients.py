"""Closed-form gradients of the combined objective w.r.t. both views.

The objective is l_tri + lambda * l_wtri with the hinge, squared
Euclidean distances and ratio weights inlined. Two conventions fix the
derivative: negative weights and the scheduler coefficient are constants
(stop-gradient), and the hinge takes subgradient 0 at its kink. With the
normalize flag on, embeddings are row-normalized first and the
normalization Jacobian (I - u u^T)/||x|| is chained in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .hardness import DEFAULT_W_MAX, DEFAULT_W_MIN, HardnessWeights
from .tensor_ops import NORM_EPS, EmbeddingBatch, l2_normalize, pairwise_sq_euclidean
from .triplet import DEFAULT_MARGIN, DIRECTIONS, TripletGeometry, build_triplets, mean_triplet_loss

# Weight functions receive the geometry and the direction name, so a
# caller can supply per-direction matrices (e.g. frozen weights when
# finite-differencing the stop-gradient objective).
WeightFn = Callable[[TripletGeometry, str], np.ndarray]


@dataclass(frozen=True)
class GradPair:
    """Partial derivatives of a scalar objective w.r.t. both views."""

    grad_a: np.ndarray
    grad_b: np.ndarray


@dataclass(frozen=True)
class ObjectiveParts:
    """Scalar objective, its two loss components, and the gradients.

    ``l_wtri`` is None when the weighted term was not evaluated
    (coefficient zero and no weighting requested).
    """

    loss: float
    l_tri: float
    l_wtri: float | None
    grads: GradPair


def _direction_grads(
    x: np.ndarray,
    y: np.ndarray,
    coeff: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of (1/(B(B-1))) sum_{i,k} coeff(i,k) * hinge(i,k) w.r.t.
    queries x and gallery y, where coeff already contains the active-set
    mask. Uses d(pos) - d(neg) cancellation: the x_i terms drop out."""
    b = x.shape[0]
    scale = 2.0 / (b * (b - 1))
    # coeff laid out B x (B-1) by ascending gallery index; lift to B x B.
    m_full = np.zeros((b, b))
    off = ~np.eye(b, dtype=bool)
    m_full[off] = coeff.ravel()
    row = m_full.sum(axis=1)
    col = m_full.sum(axis=0)
    grad_x = scale * (m_full @ y - row[:, None] * y)
    grad_y = scale * (
        row[:, None] * (y - x) + m_full.T @ x - col[:, None] * y
    )
    return grad_x, grad_y


def _normalization_backprop(raw: np.ndarray, grad_unit: np.ndarray) -> np.ndarray:
    """Chain an upstream gradient through row-wise L2 normalization.

    Rows with norm below ``NORM_EPS`` passed through normalization
    unchanged, so their Jacobian is the identity.
    """
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    degenerate = (norms < NORM_EPS).ravel()
    safe = np.where(norms < NORM_EPS, 1.0, norms)
    unit = raw / safe
    inner = np.sum(grad_unit * unit, axis=1, keepdims=True)
    out = (grad_unit - inner * unit) / safe
    out[degenerate] = grad_unit[degenerate]
    return out


def dphr_objective_with_grads(
    batch: EmbeddingBatch,
    margin: float = DEFAULT_MARGIN,
    w_min: float = DEFAULT_W_MIN,
    w_max: float = DEFAULT_W_MAX,
    lambda_t: float = 1.0,
    normalize: bool = True,
    direction: str = "both",
    weight_fn: WeightFn | None = None,
) -> ObjectiveParts:
    """Evaluate the combined objective and its exact gradients.

    ``weight_fn`` overrides the default ratio weighting; it receives the
    triplet geometry and returns a weight matrix treated as constant.
    When ``lambda_t`` is 0 and no weight_fn is given, the weighted term
    is skipped entirely and reported as None.
    """
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}")
    if lambda_t < 0:
        raise ValidationError("lambda_t must be non-negative")

    a_raw, b_raw = batch.view_a, batch.view_b
    a = l2_normalize(a_raw) if normalize else a_raw
    b = l2_normalize(b_raw) if normalize else b_raw

    skip_weights = lambda_t == 0.0 and weight_fn is None
    dirs = ("a_to_b", "b_to_a") if direction == "both" else (direction,)
    dir_scale = 1.0 / len(dirs)

    l_tri = 0.0
    l_wtri = 0.0
    grad_a = np.zeros_like(a)
    grad_b = np.zeros_like(b)

    for d in dirs:
        x, y = (a, b) if d == "a_to_b" else (b, a)
        tg = build_triplets(pairwise_sq_euclidean(x, y), margin)
        active = tg.losses > 0.0
        l_tri += dir_scale * mean_triplet_loss(tg)
        if skip_weights:
            coeff = active.astype(np.float64)
        else:
            if weight_fn is not None:
                weights = np.asarray(weight_fn(tg, d), dtype=np.float64)
            else:
                weights = HardnessWeights.from_geometry(tg, w_min, w_max).weights
            l_wtri += dir_scale * float(np.mean(weights * tg.losses))
            coeff = (1.0 + lambda_t * weights) * active
        gx, gy = _direction_grads(x, y, coeff)
        if d == "a_to_b":
            grad_a += dir_scale * gx
            grad_b += dir_scale * gy
        else:
            grad_b += dir_scale * gx
            grad_a += dir_scale * gy

    if normalize:
        grad_a = _normalization_backprop(a_raw, grad_a)
        grad_b = _normalization_backprop(b_raw, grad_b)

    if skip_weights:
        return ObjectiveParts(loss=l_tri, l_tri=l_tri, l_wtri=None, grads=GradPair(grad_a, grad_b))
    loss = l_tri + lambda_t * l_wtri
    return ObjectiveParts(loss=loss, l_tri=l_tri, l_wtri=l_wtri, grads=GradPair(grad_a, grad_b))


def grad_dphr(
    batch: EmbeddingBatch,
    margin: float = DEFAULT_MARGIN,
    w_min: float = DEFAULT_W_MIN,
    w_max: float = DEFAULT_W_MAX,
    lambda_t: float = 1.0,
    normalize: bool = True,
    direction: str = "both",
    weight_fn: WeightFn | None = None,
) -> tuple[float, GradPair]:
    """Combined objective value and its gradient pair."""
    parts = dphr_objective_with_grads(
        batch, margin, w_min, w_max, lambda_t, normalize, direction, weight_fn
    )
    return parts.loss, parts.grads


def finite_diff_gradient(
    f: Callable[[EmbeddingBatch], float],
    batch: EmbeddingBatch,
    step: float = 1e-4,
) -> GradPair:
    """Central-difference gradient of a scalar function of the batch.

    Perturbs every coordinate of both views by +-step. Test oracle only;
    cost is 4*B*D evaluations of f.
    """
    if step <= 0:
        raise ValidationError("step must be positive")

    def grad_of_view(which: str) -> np.ndarray:
        base = batch.view_a if which == "a" else batch.view_b
        g = np.zeros_like(base)
        for i in range(base.shape[0]):
            for j in range(base.shape[1]):
                plus, minus = base.copy(), base.copy()
                plus[i, j] += step
                minus[i, j] -= step
                if which == "a":
                    f_plus = f(EmbeddingBatch(plus, batch.view_b, batch.ids))
                    f_minus = f(EmbeddingBatch(minus, batch.view_b, batch.ids))
                else:
                    f_plus = f(EmbeddingBatch(batch.view_a, plus, batch.ids))
                    f_minus = f(EmbeddingBatch(batch.view_a, minus, batch.ids))
                g[i, j] = (f_plus - f_minus) / (2.0 * step)
        return g

    return GradPair(grad_a=grad_of_view("a"), grad_b=grad_of_view("b"))
