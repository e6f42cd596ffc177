"""Deterministic synthetic cross-view data with controllable hard negatives.

Each class gets a prototype on the unit sphere. A configurable fraction
of classes is placed as near-duplicate prototype pairs, mimicking
visually confusable but distinct locations. Each view observes the
prototype through a systematic per-view offset plus per-sample Gaussian
noise; one sample per class per view.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# Angular separation (radians) of the two prototypes in a hard pair.
# Far below the typical inter-class angle of random sphere points, so
# hard pairs are the dominant source of confusable negatives.
HARD_PAIR_ANGLE = 0.15


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters.

    ``hard_pair_fraction`` of the classes (rounded, must give an even
    count) are laid out as near-duplicate pairs. ``view_offset_sigma``
    scales a systematic per-view shift shared by every class;
    ``noise_sigma`` is per-coordinate sample noise.
    """

    n_classes: int = 32
    dim: int = 16
    noise_sigma: float = 0.7
    view_offset_sigma: float = 0.6
    hard_pair_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValidationError("need at least 2 classes")
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if self.noise_sigma < 0 or self.view_offset_sigma < 0:
            raise ValidationError("noise magnitudes must be non-negative")
        if not 0.0 <= self.hard_pair_fraction <= 1.0:
            raise ValidationError("hard_pair_fraction must lie in [0, 1]")
        if self.n_hard_classes % 2 != 0:
            raise ValidationError(
                f"hard_pair_fraction * n_classes rounds to {self.n_hard_classes}, "
                "which cannot form pairs; adjust the fraction or class count"
            )

    @property
    def n_hard_classes(self) -> int:
        return round(self.hard_pair_fraction * self.n_classes)


@dataclass(frozen=True)
class SynthDataset:
    """One (view-a point, view-b point) pair per class."""

    ids: np.ndarray        # (K,)
    view_a: np.ndarray     # (K, D)
    view_b: np.ndarray     # (K, D)
    prototypes: np.ndarray  # (K, D), unit rows

    @property
    def n_classes(self) -> int:
        return self.ids.shape[0]

    @property
    def dim(self) -> int:
        return self.view_a.shape[1]


def _unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def generate_dataset(cfg: SynthConfig) -> SynthDataset:
    """Generate prototypes and two noisy views, reproducibly from the seed.

    The first ``n_hard_classes`` prototypes form consecutive pairs
    rotated ``HARD_PAIR_ANGLE`` apart on the sphere; the rest are drawn
    independently. View samples are prototype + view offset + noise.
    """
    rng = np.random.default_rng(cfg.seed)
    k, d = cfg.n_classes, cfg.dim

    protos = _unit_rows(rng, k, d)
    for pair in range(cfg.n_hard_classes // 2):
        i, j = 2 * pair, 2 * pair + 1
        base = protos[i]
        # Orthonormal tangent direction at base, then rotate by the pair angle.
        t = rng.standard_normal(d)
        t -= (t @ base) * base
        t /= np.linalg.norm(t)
        protos[j] = np.cos(HARD_PAIR_ANGLE) * base + np.sin(HARD_PAIR_ANGLE) * t

    offset_a = cfg.view_offset_sigma * _unit_rows(rng, 1, d)[0]
    offset_b = cfg.view_offset_sigma * _unit_rows(rng, 1, d)[0]
    noise_a = cfg.noise_sigma * rng.standard_normal((k, d))
    noise_b = cfg.noise_sigma * rng.standard_normal((k, d))

    return SynthDataset(
        ids=np.arange(k),
        view_a=protos + offset_a + noise_a,
        view_b=protos + offset_b + noise_b,
        prototypes=protos,
    )
