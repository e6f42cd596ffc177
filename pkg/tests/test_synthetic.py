import numpy as np
import pytest

from dphr import SynthConfig, ValidationError, generate_dataset
from dphr.synthetic import HARD_PAIR_ANGLE


def test_noiseless_views_equal_prototypes():
    cfg = SynthConfig(n_classes=8, dim=6, noise_sigma=0.0, view_offset_sigma=0.0,
                      hard_pair_fraction=0.0, seed=3)
    ds = generate_dataset(cfg)
    np.testing.assert_array_equal(ds.view_a, ds.prototypes)
    np.testing.assert_array_equal(ds.view_b, ds.prototypes)


def test_same_seed_bitwise_identical():
    cfg = SynthConfig(seed=11)
    d1, d2 = generate_dataset(cfg), generate_dataset(cfg)
    np.testing.assert_array_equal(d1.view_a, d2.view_a)
    np.testing.assert_array_equal(d1.view_b, d2.view_b)
    np.testing.assert_array_equal(d1.prototypes, d2.prototypes)


def test_different_seeds_differ():
    d1 = generate_dataset(SynthConfig(seed=0))
    d2 = generate_dataset(SynthConfig(seed=1))
    assert not np.array_equal(d1.view_a, d2.view_a)


def test_prototypes_on_unit_sphere():
    ds = generate_dataset(SynthConfig(n_classes=20, dim=12, seed=5))
    np.testing.assert_allclose(np.linalg.norm(ds.prototypes, axis=1), 1.0, atol=1e-12)


def test_hard_pairs_closer_than_any_independent_pair():
    base = dict(n_classes=16, dim=16, noise_sigma=0.0, view_offset_sigma=0.0, seed=9)
    spread = generate_dataset(SynthConfig(hard_pair_fraction=0.0, **base))
    paired = generate_dataset(SynthConfig(hard_pair_fraction=1.0, **base))

    protos = spread.prototypes
    diffs = protos[:, None, :] - protos[None, :, :]
    dists = np.linalg.norm(diffs, axis=-1)
    np.fill_diagonal(dists, np.inf)
    min_independent = dists.min()

    pair_dists = [
        np.linalg.norm(paired.prototypes[2 * p] - paired.prototypes[2 * p + 1])
        for p in range(8)
    ]
    placement = 2.0 * np.sin(HARD_PAIR_ANGLE / 2.0)
    assert max(pair_dists) == pytest.approx(placement, rel=1e-9)
    assert min_independent > max(pair_dists)


def test_odd_hard_class_count_rejected():
    with pytest.raises(ValidationError):
        SynthConfig(n_classes=10, hard_pair_fraction=0.3)  # rounds to 3


def test_invalid_configs_rejected():
    with pytest.raises(ValidationError):
        SynthConfig(n_classes=1)
    with pytest.raises(ValidationError):
        SynthConfig(noise_sigma=-0.1)
    with pytest.raises(ValidationError):
        SynthConfig(hard_pair_fraction=1.5)
