"""Flat `key = value` configuration files for the harness.

One assignment per line; blank lines and `#` comments are ignored.
Unknown keys are errors so typos never silently fall back to defaults.
The full key reference lives in docs/config.md.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .scheduler import PalwConfig
from .synthetic import SynthConfig
from .training import TrainConfig

_SYNTH_KEYS = {
    "n_classes": int,
    "dim": int,
    "noise_sigma": float,
    "view_offset_sigma": float,
    "hard_pair_fraction": float,
    "data_seed": int,
}

_TRAIN_KEYS = {
    "mode": str,
    "lr": float,
    "epochs": int,
    "batch_size": int,
    "margin": float,
    "w_min": float,
    "w_max": float,
    "variant": str,
    "normalize": bool,
    "direction": str,
    "seed": int,
    "her_scale": float,
    "her_clip": float,
}

_PALW_KEYS = {
    "window": int,
    "sigma_min": float,
    "sigma_max": float,
    "delta_min": float,
    "delta_max": float,
    "gamma": float,
    "beta": float,
}

_EXPERIMENT_KEYS = {
    "variants": str,
    "seeds": str,
    "ks": str,
    "out_dir": str,
}

KNOWN_KEYS = {**_SYNTH_KEYS, **_TRAIN_KEYS, **_PALW_KEYS, **_EXPERIMENT_KEYS}


@dataclass(frozen=True)
class ExperimentConfig:
    """Synthetic-data and training defaults plus the run matrix."""

    synth: SynthConfig = field(default_factory=SynthConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    variants: tuple[str, ...] = ("baseline", "rda-only", "palw-only", "dphr")
    seeds: tuple[int, ...] = tuple(range(10))
    ks: tuple[int, ...] = (1, 5)
    out_dir: str = "runs"

    def __post_init__(self):
        if not self.seeds:
            raise ValidationError("seed list must be non-empty")
        from .training import VARIANTS

        bad = [v for v in self.variants if v not in VARIANTS]
        if bad:
            raise ValidationError(f"unknown variants: {bad}")


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {raw!r}")


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.split(",") if tok.strip())


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse assignments into a typed dict, rejecting unknown keys."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in KNOWN_KEYS:
            raise ValidationError(f"{source}:{lineno}: unknown key {key!r}")
        caster = KNOWN_KEYS[key]
        try:
            if caster is bool:
                values[key] = _parse_bool(raw)
            else:
                values[key] = caster(raw)
        except ValueError as exc:
            raise ValidationError(f"{source}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def load_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text()
    return experiment_config_from_values(parse_config_text(text, source=str(path)))


def experiment_config_from_values(values: dict) -> ExperimentConfig:
    """Assemble the nested config dataclasses from a flat key dict."""
    synth_kwargs = {k: values[k] for k in _SYNTH_KEYS if k in values and k != "data_seed"}
    if "data_seed" in values:
        synth_kwargs["seed"] = values["data_seed"]
    palw_kwargs = {k: values[k] for k in _PALW_KEYS if k in values}
    train_kwargs = {k: values[k] for k in _TRAIN_KEYS if k in values}
    if palw_kwargs:
        train_kwargs["palw"] = PalwConfig(**palw_kwargs)

    exp_kwargs: dict = {}
    if "variants" in values:
        exp_kwargs["variants"] = tuple(
            tok.strip() for tok in values["variants"].split(",") if tok.strip()
        )
    if "seeds" in values:
        exp_kwargs["seeds"] = _parse_int_list(values["seeds"])
    if "ks" in values:
        exp_kwargs["ks"] = _parse_int_list(values["ks"])
    if "out_dir" in values:
        exp_kwargs["out_dir"] = values["out_dir"]

    return ExperimentConfig(
        synth=SynthConfig(**synth_kwargs),
        train=TrainConfig(**train_kwargs),
        **exp_kwargs,
    )
