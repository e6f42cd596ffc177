import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dphr import (
    HardnessWeights,
    TripletGeometry,
    ValidationError,
    build_triplets,
    gap_clip_weights,
    hardness_scores,
    linear_scale,
    mean_triplet_loss,
    weighted_triplet_loss,
)


def geometry_from(pos, neg, margin=0.3):
    pos = np.asarray(pos, float)
    neg = np.asarray(neg, float)
    losses = np.maximum(0.0, pos[:, None] - neg + margin)
    return TripletGeometry(pos_dist=pos, neg_dist=neg, margin=margin, losses=losses)


def test_symmetric_distances_score_half():
    tg = geometry_from([1.0], [[1.0]])
    np.testing.assert_allclose(hardness_scores(tg), [[0.5]])


def test_hand_ratio():
    tg = geometry_from([3.0], [[1.0]])
    np.testing.assert_allclose(hardness_scores(tg), [[0.75]])


def test_degenerate_both_zero_maps_to_half():
    tg = geometry_from([0.0], [[0.0]])
    np.testing.assert_array_equal(hardness_scores(tg), [[0.5]])


def test_scores_in_unit_interval(rng):
    tg = geometry_from(np.abs(rng.standard_normal(6)), np.abs(rng.standard_normal((6, 5))))
    s = hardness_scores(tg)
    assert np.all(s >= 0.0) and np.all(s <= 1.0)


def test_scale_invariance(rng):
    pos = np.abs(rng.standard_normal(5)) + 1e-3
    neg = np.abs(rng.standard_normal((5, 4))) + 1e-3
    base = hardness_scores(geometry_from(pos, neg))
    for c in (1e-6, 0.37, 1.0, 42.0, 1e6):
        scaled = hardness_scores(geometry_from(c * pos, c * neg))
        np.testing.assert_allclose(scaled, base, rtol=1e-12)


def test_scores_strictly_decrease_in_neg_dist():
    negs = np.array([[0.5, 1.0, 2.0, 4.0]])
    s = hardness_scores(geometry_from([1.0], negs))
    assert np.all(np.diff(s[0]) < 0.0)


class TestLinearScale:
    def test_endpoints_with_shipped_interval(self):
        assert linear_scale(0.0, 0.5, 2.0) == 0.5
        assert linear_scale(1.0, 0.5, 2.0) == 2.0

    def test_midpoint(self):
        assert linear_scale(0.5, 0.5, 2.0) == pytest.approx(1.25)

    def test_collapsed_interval(self):
        for x in (0.0, 0.3, 1.0):
            assert linear_scale(x, 0.8, 0.8) == 0.8

    def test_rejects_out_of_range_input(self):
        with pytest.raises(ValidationError):
            linear_scale(1.5, 0.0, 1.0)
        with pytest.raises(ValidationError):
            linear_scale(-0.1, 0.0, 1.0)

    def test_rejects_inverted_interval(self):
        with pytest.raises(ValidationError):
            linear_scale(0.5, 2.0, 0.5)

    @given(st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_output_stays_in_interval(self, x):
        y = linear_scale(x, 0.5, 2.0)
        assert 0.5 <= y <= 2.0


class TestWeightedLoss:
    def test_unit_weights_reduce_to_mean(self, rng):
        tg = build_triplets(np.abs(rng.standard_normal((5, 5))), 0.3)
        hw = HardnessWeights.from_geometry(tg, w_min=1.0, w_max=1.0)
        assert weighted_triplet_loss(tg, hw) == mean_triplet_loss(tg)

    def test_hand_weighted_mean(self):
        tg = geometry_from([0.2, 0.3], [[0.6], [0.1]])
        hw = HardnessWeights(
            scores=np.array([[1.0], [0.0]]),
            weights=np.array([[2.0], [0.5]]),
            w_min=0.5,
            w_max=2.0,
        )
        np.testing.assert_allclose(tg.losses, [[0.0], [0.5]])
        assert weighted_triplet_loss(tg, hw) == pytest.approx(0.125)

    def test_matches_naive_double_loop(self, rng):
        from conftest import naive_weighted_mean

        tg = build_triplets(np.abs(rng.standard_normal((6, 6))), 0.3)
        hw = HardnessWeights.from_geometry(tg)
        expected = naive_weighted_mean(tg.losses, hw.weights)
        assert weighted_triplet_loss(tg, hw) == pytest.approx(expected, abs=1e-12)

    def test_bounded_by_weight_interval(self, rng):
        tg = build_triplets(np.abs(rng.standard_normal((6, 6))), 0.5)
        hw = HardnessWeights.from_geometry(tg, 0.5, 2.0)
        mean = mean_triplet_loss(tg)
        w = weighted_triplet_loss(tg, hw)
        assert 0.5 * mean - 1e-12 <= w <= 2.0 * mean + 1e-12


def test_weights_monotone_in_scores():
    scores = np.linspace(0.0, 1.0, 11)
    weights = linear_scale(scores, 0.5, 2.0)
    assert np.all(np.diff(weights) >= 0.0)


def test_from_geometry_weights_are_affine_in_scores(rng):
    tg = build_triplets(np.abs(rng.standard_normal((4, 4))), 0.3)
    hw = HardnessWeights.from_geometry(tg, 0.5, 2.0)
    np.testing.assert_array_equal(hw.weights, 0.5 + 1.5 * hw.scores)
    assert np.all(hw.weights >= 0.5) and np.all(hw.weights <= 2.0)


def test_gap_clip_weights_saturate():
    tg = geometry_from([5.0, 0.0], [[0.2], [5.0]], margin=0.3)
    w = gap_clip_weights(tg, scale=1.0, clip=2.0)
    # First triplet violates by 5.1 -> clipped; second is satisfied -> 1.
    np.testing.assert_allclose(w, [[2.0], [1.0]])
