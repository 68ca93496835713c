"""Experiment harness: specs, generators, runner and output."""

from .generators import AdversaryInstance, gen_coupon_collector_caching, gen_uniform_mts_adversary
from .output import CSV_HEADER, emit_csv, emit_plot_data, plot_series
from .runner import ResultRow, run_experiment
from .spec import ExperimentSpec, PredictorSpec, load_spec, spec_from_dict

__all__ = [
    "AdversaryInstance",
    "gen_coupon_collector_caching",
    "gen_uniform_mts_adversary",
    "CSV_HEADER",
    "emit_csv",
    "emit_plot_data",
    "plot_series",
    "ResultRow",
    "run_experiment",
    "ExperimentSpec",
    "PredictorSpec",
    "load_spec",
    "spec_from_dict",
]
