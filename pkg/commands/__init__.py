"""
Commands module for Delayed OFW Toolkit
"""

from .run import command as run_command
from .sweep import command as sweep_command
from .gapcheck import command as gapcheck_command
from .dump import command as dump_command

__all__ = [
    "run_command",
    "sweep_command",
    "gapcheck_command",
    "dump_command",
]
