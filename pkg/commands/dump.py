"""
================================================================================
                    COMANDO dump
================================================================================
"""

from pathlib import Path
from typing import Optional

import typer

from commands.common import exit_codes, load
from config import get_settings
from services.harness import (
    build_feasible_set,
    build_schedule,
    build_stream,
    delay_seed,
    stream_seed,
)
from storage.csv_store import write_delays, write_stream


def command(
    config: Path = typer.Option(..., "--config", help="Archivo de experimento"),
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", help="Directorio de salida (por defecto output_dir)"),
):
    """Escribe stream.csv y delays.csv del experimento."""
    out_dir = out_dir or Path(get_settings().output_dir)
    with exit_codes():
        experiment = load(config)
        T = experiment.run.horizon
        feasible_set = build_feasible_set(experiment.problem)
        stream = build_stream(experiment.losses, feasible_set, T, stream_seed(experiment))
        schedule = build_schedule(experiment.delays, T, delay_seed(experiment))
        write_stream(out_dir / "stream.csv", stream)
        write_delays(out_dir / "delays.csv", schedule)
        typer.echo(f"stream.csv y delays.csv en {out_dir}")
