"""Experiment configs, sweep runners and the ``omnisec`` command line."""
from .config import ExperimentConfig, default_document, load_config, parse_config, serialize
from .sweeps import SweepRow, run_classify, run_experiment, run_sweep_a, run_sweep_b, run_tilt_sweep

__all__ = ["ExperimentConfig", "SweepRow", "default_document", "load_config", "parse_config",
           "run_classify", "run_experiment", "run_sweep_a", "run_sweep_b", "run_tilt_sweep",
           "serialize"]
