"""Progress-adaptive weighting of the hardness-weighted loss term.

The scheduler watches a windowed moving average of the recent unweighted
triplet losses. While that average is high (early, unstable training) the
coefficient stays near its lower bound, muting the hard-negative term;
as the average falls the coefficient ramps toward its upper bound. An
exponential moving average smooths the ramp. One scheduler instance
belongs to one training run and is stepped sequentially; it is never
shared for concurrent stepping.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import ValidationError
from .hardness import linear_scale


@dataclass(frozen=True)
class PalwConfig:
    """Scheduler hyperparameters.

    ``window`` caps the moving-average length in iterations. The loss
    average is normalized against [sigma_min, sigma_max] and the
    resulting coefficient lives in [delta_min, delta_max]; ``gamma``
    shapes the transition and ``beta`` is the EMA smoothing factor.
    """

    window: int = 16
    sigma_min: float = 0.8
    sigma_max: float = 1.5
    delta_min: float = 0.2
    delta_max: float = 1.0
    gamma: float = 1.5
    beta: float = 0.9

    def __post_init__(self):
        if self.window < 1:
            raise ValidationError("window must be >= 1")
        if not self.sigma_min < self.sigma_max:
            raise ValidationError("need sigma_min < sigma_max")
        if self.delta_min > self.delta_max:
            raise ValidationError("need delta_min <= delta_max")
        if self.gamma <= 0:
            raise ValidationError("gamma must be positive")
        if not 0.0 <= self.beta < 1.0:
            raise ValidationError("beta must lie in [0, 1)")


@dataclass
class PalwState:
    """Mutable scheduler state: loss history, step counter, last coefficient."""

    config: PalwConfig = field(default_factory=PalwConfig)
    history: deque = field(init=False)
    t: int = field(init=False, default=0)
    lambda_prev: float | None = field(init=False, default=None)

    def __post_init__(self):
        self.history = deque(maxlen=self.config.window)


@dataclass(frozen=True)
class PalwTrace:
    """Intermediates of one scheduler step, for telemetry."""

    t: int
    loss: float
    alpha: float
    alpha_hat: float
    lambda_inst: float
    lambda_value: float


def progress_signal(state: PalwState, loss_t: float) -> float:
    """Push the current unweighted loss and return the windowed mean.

    The window holds at most ``config.window`` values and always includes
    the incoming loss, so after t steps it averages min(window, t+1)
    entries. Non-finite or negative losses raise and leave the state
    untouched.
    """
    if not math.isfinite(loss_t) or loss_t < 0:
        raise ValidationError(f"loss must be finite and non-negative, got {loss_t}")
    state.history.append(loss_t)
    return sum(state.history) / len(state.history)


def normalize_progress(alpha: float, cfg: PalwConfig) -> float:
    """Map the loss average onto [0, 1] against the sigma band, clamped."""
    x = (alpha - cfg.sigma_min) / (cfg.sigma_max - cfg.sigma_min)
    return min(1.0, max(0.0, x))


def instantaneous_coefficient(alpha_hat: float, cfg: PalwConfig) -> float:
    """Coefficient before smoothing: delta_min when progress is raw
    (alpha_hat = 1), delta_max when the loss has settled (alpha_hat = 0),
    with a power-curve transition in between."""
    if not 0.0 <= alpha_hat <= 1.0:
        raise ValidationError("alpha_hat must lie in [0, 1]")
    return float(linear_scale((1.0 - alpha_hat) ** cfg.gamma, cfg.delta_min, cfg.delta_max))


def ema_update(state: PalwState, lambda_inst: float, cfg: PalwConfig) -> float:
    """Smooth the instantaneous coefficient with an EMA.

    The first step has no previous value and adopts lambda_inst directly;
    seeding with a constant would contradict early suppression.
    """
    if state.lambda_prev is None:
        lam = float(lambda_inst)
    else:
        lam = cfg.beta * state.lambda_prev + (1.0 - cfg.beta) * lambda_inst
    state.lambda_prev = lam
    return lam


def dphr_loss(l_tri: float, l_wtri: float, lambda_t: float) -> float:
    """Combined objective: unweighted loss plus the scheduled weighted term."""
    return l_tri + lambda_t * l_wtri


def palw_step(state: PalwState, loss_t: float, cfg: PalwConfig | None = None) -> tuple[float, PalwTrace]:
    """Advance the scheduler by one iteration.

    Chains the moving average, normalization, instantaneous coefficient
    and EMA, increments the step counter, and returns the smoothed
    coefficient plus all intermediates.
    """
    cfg = cfg or state.config
    alpha = progress_signal(state, loss_t)
    alpha_hat = normalize_progress(alpha, cfg)
    lam_inst = instantaneous_coefficient(alpha_hat, cfg)
    lam = ema_update(state, lam_inst, cfg)
    trace = PalwTrace(
        t=state.t,
        loss=float(loss_t),
        alpha=alpha,
        alpha_hat=alpha_hat,
        lambda_inst=lam_inst,
        lambda_value=lam,
    )
    state.t += 1
    return lam, trace
