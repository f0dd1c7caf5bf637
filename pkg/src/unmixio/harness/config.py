"""Experiment configuration: an INI file plus command-line overrides."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from typing import Optional

from ..core import ConfigError

EXPERIMENTS = (
    "table1",
    "table3",
    "fig2",
    "fig3",
    "appendix3",
    "sec7-envelope",
    "sec9-unmix",
    "sec10-oscillators",
    "sec11-ampmod",
)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    n_samples: Optional[int] = None
    epochs: Optional[int] = None
    mix: float = 0.7
    order: Optional[int] = None
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.n_samples is not None and self.n_samples < 100:
            raise ConfigError("samples must be at least 100")
        if self.epochs is not None and self.epochs < 2:
            raise ConfigError("epochs must be at least 2")
        if not abs(self.mix) < 1:
            raise ConfigError("mix must satisfy |c| < 1")
        if self.order is not None and self.order < 1:
            raise ConfigError("order must be at least 1")
        if self.out_dir is None:
            object.__setattr__(self, "out_dir", os.path.join("results", self.experiment))

    def overrides(self) -> dict:
        """Parameters that define the run's numbers (everything but out_dir)."""
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "out_dir"}


_CASTS = {"experiment": str, "seed": int, "n_samples": int, "samples": int, "epochs": int,
          "mix": float, "order": int, "out_dir": str, "out": str}
_ALIASES = {"samples": "n_samples", "out": "out_dir"}


def _coerce(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        if value is None:
            continue
        if key not in _CASTS:
            raise ConfigError(f"unknown configuration key {key!r}")
        try:
            cast = _CASTS[key](value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
        out[_ALIASES.get(key, key)] = cast
    return out


def load_config(path=None, **flags) -> ExperimentConfig:
    """Build a config from an optional INI file, then apply non-None flags.

    Keys may sit in any section (one nesting level) or at top level under
    ``[DEFAULT]``; flags win over the file.
    """
    values: dict = {}
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        raw = dict(parser.defaults())
        for section in parser.sections():
            for key, value in parser.items(section):
                raw[key] = value
        values.update(_coerce(raw))
    values.update(_coerce({k: v for k, v in flags.items() if v is not None}))
    if "experiment" not in values:
        raise ConfigError("no experiment id given")
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def with_out_dir(cfg: ExperimentConfig, out_dir: str) -> ExperimentConfig:
    return replace(cfg, out_dir=str(out_dir))
