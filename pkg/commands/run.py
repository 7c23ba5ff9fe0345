"""
================================================================================
                    COMANDO run
================================================================================
"""

from pathlib import Path
from typing import Optional

import typer

from commands.common import exit_codes, load
from services.harness import run_experiment
from storage.csv_store import format_real, write_rounds


def command(
    config: Path = typer.Option(..., "--config", help="Archivo de experimento"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV por ronda (por defecto run.output)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Reemplaza run.base_seed"),
):
    """Ejecuta un experimento y escribe el CSV por ronda."""
    with exit_codes():
        experiment = load(config, seed)
        result = run_experiment(experiment)

        target = out or (Path(experiment.run.output) if experiment.run.output else None)
        if target is not None:
            write_rounds(target, result.rounds)
            typer.echo(f"CSV por ronda: {target}")

        typer.echo(f"algoritmo:      {experiment.run.algorithm.value}")
        typer.echo(f"T:              {experiment.run.horizon}")
        typer.echo(f"d = max d_t:    {result.max_delay}")
        typer.echo(f"regret R(T):    {format_real(result.regret)}")
        typer.echo(f"comparador:     {result.comparator_method}")
        if result.regret_bound is not None:
            typer.echo(f"cota de regret: {format_real(result.regret_bound)}")
        if result.undelivered:
            typer.echo(f"sin llegar:     {result.undelivered} gradientes")
