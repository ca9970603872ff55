"""Experiment harness: metrics, file formats, runners, plots and the CLI."""
from .experiments import MetricRecord, RealRecord, run_experiment, run_realdata
from .io import RealDataset, load_multilayer, write_scenario
from .metrics import misclassification_rate
from .plots import emit_plots

__all__ = [
    "MetricRecord",
    "RealDataset",
    "RealRecord",
    "emit_plots",
    "load_multilayer",
    "misclassification_rate",
    "run_experiment",
    "run_realdata",
    "write_scenario",
]
