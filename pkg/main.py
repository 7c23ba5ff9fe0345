"""
================================================================================
                    DELAYED OFW TOOLKIT - CLI PRINCIPAL
================================================================================
                    Frank-Wolfe en linea con retrasos arbitrarios
                    Comandos: run, sweep, gapcheck, dump
================================================================================
"""

import logging

import typer

from config import get_settings
from commands import dump_command, gapcheck_command, run_command, sweep_command


settings = get_settings()

app = typer.Typer(
    name="dofw",
    help="Experimentos de Frank-Wolfe en linea con retroalimentacion retrasada.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def startup(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Logging en nivel DEBUG"),
):
    """Configura logging e imprime el encabezado"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level.upper(),
        format=settings.log_format,
    )
    typer.echo("=" * 60, err=True)
    typer.echo("DELAYED OFW TOOLKIT", err=True)
    typer.echo(f"   Tolerancia de pertenencia: {settings.membership_tol:g}", err=True)
    typer.echo(f"   Procesos de barrido: {settings.sweep_workers}", err=True)
    typer.echo("=" * 60, err=True)


# Registrar comandos
app.command(name="run")(run_command)
app.command(name="sweep")(sweep_command)
app.command(name="gapcheck")(gapcheck_command)
app.command(name="dump")(dump_command)


if __name__ == "__main__":
    app()
