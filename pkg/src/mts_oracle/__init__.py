"""Online algorithms with configuration predictions for metrical task systems,
caching and online matching, with exact offline solvers and an experiment harness."""

from .combine import FtpPolicy, ftp_step, min_det_run, min_rand_run, robust_ftp
from .core import (
    INF,
    LineMetric,
    MatrixMetric,
    MetricSpace,
    MtsInstance,
    Policy,
    PredictionTrace,
    RunResult,
    Task,
    Trajectory,
    UniformMetric,
    competitive_ratio,
    offline_optimum,
    prediction_error,
    run_online,
    trajectory_cost,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "INF",
    "LineMetric",
    "MatrixMetric",
    "MetricSpace",
    "MtsInstance",
    "Policy",
    "PredictionTrace",
    "RunResult",
    "Task",
    "Trajectory",
    "UniformMetric",
    "competitive_ratio",
    "offline_optimum",
    "prediction_error",
    "run_online",
    "trajectory_cost",
    "FtpPolicy",
    "ftp_step",
    "min_det_run",
    "min_rand_run",
    "robust_ftp",
]
