"""Shared fixtures and naive reference implementations.

The naive functions are deliberately loop-based and independent of the
vectorized library paths; several tests and the acceptance suite compare
against them.
"""

import numpy as np
import pytest

from dphr import (
    EmbeddingBatch,
    HardnessWeights,
    build_triplets,
    finite_diff_gradient,
    grad_dphr,
    l2_normalize,
    pairwise_sq_euclidean,
)


def naive_pairwise_sq(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    out = np.zeros((a.shape[0], b.shape[0]))
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            s = 0.0
            for k in range(a.shape[1]):
                diff = a[i, k] - b[j, k]
                s += diff * diff
            out[i, j] = s
    return out


def naive_triplet_losses(dm, margin):
    dm = np.asarray(dm, float)
    b = dm.shape[0]
    losses = np.zeros((b, b - 1))
    for i in range(b):
        col = 0
        for j in range(b):
            if j == i:
                continue
            losses[i, col] = max(0.0, dm[i, i] - dm[i, j] + margin)
            col += 1
    return losses


def naive_weighted_mean(losses, weights):
    losses, weights = np.asarray(losses), np.asarray(weights)
    b, m = losses.shape
    total = 0.0
    for i in range(b):
        for k in range(m):
            total += weights[i, k] * losses[i, k]
    return total / (b * m)


def naive_average_precision(ranked_relevant):
    """AP from a boolean relevance list in rank order, via an explicit
    precision/recall curve walk (area = sum of precision * recall step)."""
    n_rel = sum(ranked_relevant)
    assert n_rel > 0
    area = 0.0
    hits = 0
    for rank, rel in enumerate(ranked_relevant, start=1):
        if rel:
            hits += 1
            recall_step = 1.0 / n_rel
            precision = hits / rank
            area += precision * recall_step
    return area


def random_batch(rng, b=8, d=16, spread=0.4):
    a = rng.standard_normal((b, d))
    bb = a + spread * rng.standard_normal((b, d))
    return EmbeddingBatch(a, bb)


# --- finite-difference gradient-check protocol -------------------------
#
# The analytic gradient treats hardness weights as constants, so the
# finite-difference oracle must evaluate the objective with the weights
# frozen at the base point. Coordinates whose +-step perturbation flips
# any hinge activation are excluded: central differences are meaningless
# across the kink. Relative error uses a 1e-3 denominator floor; below
# it the comparison degenerates to an absolute tolerance, which is the
# only sound reading at near-zero coordinates.

GRAD_CHECK_STEP = 1e-4
REL_ERR_FLOOR = 1e-3


def _directions(direction):
    return ("a_to_b", "b_to_a") if direction == "both" else (direction,)


def _frozen_weight_fn(batch, margin, w_min, w_max, normalize):
    a = l2_normalize(batch.view_a) if normalize else batch.view_a
    b = l2_normalize(batch.view_b) if normalize else batch.view_b
    frozen = {}
    for d in ("a_to_b", "b_to_a"):
        x, y = (a, b) if d == "a_to_b" else (b, a)
        tg = build_triplets(pairwise_sq_euclidean(x, y), margin)
        frozen[d] = HardnessWeights.from_geometry(tg, w_min, w_max).weights
    return lambda tg, d: frozen[d]


def _activation_signature(batch, margin, normalize, direction):
    a = l2_normalize(batch.view_a) if normalize else batch.view_a
    b = l2_normalize(batch.view_b) if normalize else batch.view_b
    sigs = []
    for d in _directions(direction):
        x, y = (a, b) if d == "a_to_b" else (b, a)
        tg = build_triplets(pairwise_sq_euclidean(x, y), margin)
        sigs.append(tg.losses > 0.0)
    return np.concatenate([s.ravel() for s in sigs])


def kink_free_masks(batch, margin, step, normalize, direction):
    """Boolean (view_a, view_b) masks of coordinates whose perturbation
    does not change any hinge activation."""
    base = _activation_signature(batch, margin, normalize, direction)
    masks = []
    for which in ("a", "b"):
        view = batch.view_a if which == "a" else batch.view_b
        mask = np.ones(view.shape, dtype=bool)
        for i in range(view.shape[0]):
            for j in range(view.shape[1]):
                for delta in (step, -step):
                    perturbed = view.copy()
                    perturbed[i, j] += delta
                    if which == "a":
                        cand = EmbeddingBatch(perturbed, batch.view_b, batch.ids)
                    else:
                        cand = EmbeddingBatch(batch.view_a, perturbed, batch.ids)
                    sig = _activation_signature(cand, margin, normalize, direction)
                    if not np.array_equal(sig, base):
                        mask[i, j] = False
                        break
        masks.append(mask)
    return masks[0], masks[1]


def grad_check_rel_errors(
    batch,
    margin=0.3,
    w_min=0.5,
    w_max=2.0,
    lambda_t=0.7,
    normalize=True,
    direction="both",
    step=GRAD_CHECK_STEP,
):
    """Relative errors of the analytic gradient vs central differences,
    restricted to kink-free coordinates. Returns (errors, n_excluded)."""
    wfn = _frozen_weight_fn(batch, margin, w_min, w_max, normalize)
    _, analytic = grad_dphr(
        batch, margin, w_min, w_max, lambda_t, normalize, direction
    )
    f = lambda bb: grad_dphr(
        bb, margin, w_min, w_max, lambda_t, normalize, direction, weight_fn=wfn
    )[0]
    fd = finite_diff_gradient(f, batch, step)
    mask_a, mask_b = kink_free_masks(batch, margin, step, normalize, direction)

    errors = []
    for got, want, mask in (
        (analytic.grad_a, fd.grad_a, mask_a),
        (analytic.grad_b, fd.grad_b, mask_b),
    ):
        denom = np.maximum(np.maximum(np.abs(got), np.abs(want)), REL_ERR_FLOOR)
        errors.append((np.abs(got - want) / denom)[mask])
    n_excluded = int((~mask_a).sum() + (~mask_b).sum())
    return np.concatenate(errors), n_excluded


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
