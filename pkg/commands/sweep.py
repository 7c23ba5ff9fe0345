"""
================================================================================
                    COMANDO sweep
================================================================================
"""

from pathlib import Path
from typing import Optional

import typer

from commands.common import exit_codes, load, parse_int_list
from services.harness import median_regret, scaling_slope, sweep
from storage.csv_store import format_real, write_sweep


def command(
    config: Path = typer.Option(..., "--config", help="Archivo de experimento base"),
    horizons: str = typer.Option(..., "--T", help="Horizontes separados por coma"),
    delays: str = typer.Option(..., "--d", help="Retrasos separados por coma"),
    out: Path = typer.Option(..., "--out", help="CSV de barrido"),
    seeds: int = typer.Option(1, "--seeds", min=1, help="Replicas por celda"),
    workers: Optional[int] = typer.Option(None, "--workers", min=1, help="Procesos en paralelo"),
):
    """Barrido de T x d con semillas derivadas por celda."""
    T_list = parse_int_list(horizons, "--T")
    d_list = parse_int_list(delays, "--d")
    with exit_codes():
        base = load(config)
        rows = sweep(base, T_list, d_list, seeds=seeds, workers=workers)
        write_sweep(out, rows)
        typer.echo(f"CSV de barrido: {out} ({len(rows)} filas)")

        for (T, d), value in median_regret(rows).items():
            typer.echo(f"T={T:<8d} d={d:<6d} mediana R(T)={format_real(value)}")
        if len(T_list) >= 3:
            for d in d_list:
                typer.echo(f"pendiente log-log (d={d}): {scaling_slope(rows, d):.4f}")
