"""
================================================================================
                    COMANDO gapcheck
================================================================================
Ejecuta el experimento verificando la brecha del sustituto antes de cada
gradiente ingerido; sale con codigo 3 ante la primera violacion.
"""

from pathlib import Path

import typer

from commands.common import exit_codes, load
from services.harness import gap_monitor_for, run_experiment


def command(
    config: Path = typer.Option(..., "--config", help="Archivo de experimento"),
):
    """Verifica las cotas de brecha del sustituto en cada ronda."""
    with exit_codes():
        experiment = load(config)
        monitor = gap_monitor_for(experiment, strict=True)
        run_experiment(experiment, monitor=monitor)
        typer.echo(f"verificaciones: {len(monitor.records)}")
        typer.echo(f"violaciones:    {len(monitor.violations)}")
        typer.echo(f"peor brecha/cota: {monitor.worst_ratio:.6g}")
