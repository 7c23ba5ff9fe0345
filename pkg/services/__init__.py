"""
Services module for Delayed OFW Toolkit
"""

from .geometry import Box, FeasibleSet, L2Ball, Simplex
from .losses import LinearStream, LossStream, QuadraticStream
from .delay import DelaySchedule, FeedbackQueue
from .solvers import DelayedOFW, DelayedOGD, DelayedStronglyConvexOFW
from .oracle import SurrogateGapMonitor, offline_comparator, reference_ofw_convex, reference_ofw_sc
from .config_parser import load_config, parse_config
from .harness import ExperimentRunner, fit_slope, get_experiment_runner, run_experiment, sweep

__all__ = [
    "Box",
    "FeasibleSet",
    "L2Ball",
    "Simplex",
    "LinearStream",
    "LossStream",
    "QuadraticStream",
    "DelaySchedule",
    "FeedbackQueue",
    "DelayedOFW",
    "DelayedOGD",
    "DelayedStronglyConvexOFW",
    "SurrogateGapMonitor",
    "offline_comparator",
    "reference_ofw_convex",
    "reference_ofw_sc",
    "load_config",
    "parse_config",
    "ExperimentRunner",
    "fit_slope",
    "get_experiment_runner",
    "run_experiment",
    "sweep",
]
