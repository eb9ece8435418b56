"""Experiment configuration, replicated execution and export."""

from maoeacs.harness.config import ConfigError, ExperimentConfig, SweepGrid, parse_config
from maoeacs.harness.experiment import ExperimentResult, mean_std, run_experiment
from maoeacs.harness.export import CELL_COLUMNS, RUN_COLUMNS, export, read_runs_csv

__all__ = [
    "CELL_COLUMNS",
    "RUN_COLUMNS",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "SweepGrid",
    "export",
    "mean_std",
    "parse_config",
    "read_runs_csv",
    "run_experiment",
]
