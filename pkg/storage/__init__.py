"""
Storage module for Delayed OFW Toolkit
"""

from .models import ExperimentConfig, ExperimentResult, RoundLog, SweepRow
from .csv_store import read_rounds, read_sweep, write_delays, write_rounds, write_stream, write_sweep

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "RoundLog",
    "SweepRow",
    "read_rounds",
    "read_sweep",
    "write_delays",
    "write_rounds",
    "write_stream",
    "write_sweep",
]
