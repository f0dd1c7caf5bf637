"""Reproduction harness: experiment configs, runners, manifests and plots."""

from .config import EXPERIMENTS, ExperimentConfig, load_config
from .experiments import StageError, run_experiment
from .manifest import CompareReport, Manifest, compare_runs

__all__ = [
    "EXPERIMENTS",
    "CompareReport",
    "ExperimentConfig",
    "Manifest",
    "StageError",
    "compare_runs",
    "load_config",
    "run_experiment",
]
