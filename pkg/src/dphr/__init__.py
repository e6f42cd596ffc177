"""Dual-level hardness-aware reweighting for triplet metric learning.

Sample level: each in-batch negative is weighted by how close it sits to
the query relative to the positive. Batch level: a progress-driven
coefficient ramps the weighted term in as training stabilizes. The
package ships analytic gradients, a deterministic synthetic benchmark,
retrieval metrics, and a CLI harness for ablation experiments.
"""

from .configio import ExperimentConfig, load_config
from .errors import (
    BatchTooSmallError,
    DimensionError,
    DivergenceError,
    ValidationError,
)
from .evaluation import RetrievalResult, evaluate
from .gradients import (
    GradPair,
    ObjectiveParts,
    dphr_objective_with_grads,
    finite_diff_gradient,
    grad_dphr,
)
from .hardness import (
    DEFAULT_W_MAX,
    DEFAULT_W_MIN,
    HardnessWeights,
    gap_clip_weights,
    hardness_scores,
    linear_scale,
    weighted_triplet_loss,
)
from .scheduler import (
    PalwConfig,
    PalwState,
    PalwTrace,
    dphr_loss,
    ema_update,
    instantaneous_coefficient,
    normalize_progress,
    palw_step,
    progress_signal,
)
from .synthetic import SynthConfig, SynthDataset, generate_dataset
from .tensor_ops import EmbeddingBatch, l2_normalize, pairwise_sq_euclidean
from .training import RunRecord, TrainConfig, TrainResult, train
from .triplet import (
    DEFAULT_MARGIN,
    TripletGeometry,
    bidirectional_triplet_loss,
    build_triplets,
    mean_triplet_loss,
)

__all__ = [
    "BatchTooSmallError",
    "DEFAULT_MARGIN",
    "DEFAULT_W_MAX",
    "DEFAULT_W_MIN",
    "DimensionError",
    "DivergenceError",
    "EmbeddingBatch",
    "ExperimentConfig",
    "GradPair",
    "HardnessWeights",
    "ObjectiveParts",
    "PalwConfig",
    "PalwState",
    "PalwTrace",
    "RetrievalResult",
    "RunRecord",
    "SynthConfig",
    "SynthDataset",
    "TrainConfig",
    "TrainResult",
    "TripletGeometry",
    "ValidationError",
    "bidirectional_triplet_loss",
    "build_triplets",
    "dphr_loss",
    "dphr_objective_with_grads",
    "ema_update",
    "evaluate",
    "finite_diff_gradient",
    "gap_clip_weights",
    "generate_dataset",
    "grad_dphr",
    "hardness_scores",
    "instantaneous_coefficient",
    "l2_normalize",
    "linear_scale",
    "load_config",
    "mean_triplet_loss",
    "normalize_progress",
    "pairwise_sq_euclidean",
    "palw_step",
    "progress_signal",
    "train",
    "weighted_triplet_loss",
]
