"""Declarative experiments producing hash-stamped CSV and YAML artifacts"""

from jscc_sim.experiments.config import (
    KINDS,
    ExperimentConfig,
    default_config_yaml,
    load_experiment_config,
)
from jscc_sim.experiments.runners import RUNNERS, run_experiment

__all__ = [
    "KINDS",
    "ExperimentConfig",
    "default_config_yaml",
    "load_experiment_config",
    "RUNNERS",
    "run_experiment",
]
