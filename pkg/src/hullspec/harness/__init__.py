"""Experiment configuration, drivers, result records and the CLI."""
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import (groupoid_battery, poly_norm, run, run_bands, run_butterfly,
                          run_converge, run_counterexample, run_groupoid_selftest, run_p2check)
from .records import ResultRecord, Table, format_distance

__all__ = [
    "ConfigError", "ExperimentConfig", "load_config", "parse_config",
    "ResultRecord", "Table", "format_distance", "groupoid_battery", "poly_norm", "run",
    "run_bands", "run_butterfly", "run_converge", "run_counterexample",
    "run_groupoid_selftest", "run_p2check",
]
