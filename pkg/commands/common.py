"""
================================================================================
                    UTILIDADES COMPARTIDAS DEL CLI
================================================================================
"""

from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional

import typer

from config import EXIT_CONFIG_ERROR, EXIT_INVARIANT_VIOLATION
from errors import ConfigError, ContractViolation, InvariantViolation
from services.config_parser import load_config
from storage.models import ExperimentConfig


@contextmanager
def exit_codes():
    """Traduce los errores del toolkit a codigos de salida"""
    try:
        yield
    except ConfigError as exc:
        typer.echo(f"error de configuracion: {exc}", err=True)
        raise typer.Exit(code=EXIT_CONFIG_ERROR)
    except (InvariantViolation, ContractViolation) as exc:
        typer.echo(f"violacion de invariante: {exc}", err=True)
        raise typer.Exit(code=EXIT_INVARIANT_VIOLATION)


def load(path: Path, seed: Optional[int] = None) -> ExperimentConfig:
    config = load_config(path)
    if seed is not None:
        config = config.with_seed(seed)
    return config


def parse_int_list(text: str, name: str) -> List[int]:
    """"1024, 2048" -> [1024, 2048]"""
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise typer.BadParameter(f"{name} debe ser una lista de enteros separados por coma: {text!r}")
    if not values or any(value < 1 for value in values):
        raise typer.BadParameter(f"{name} requiere enteros positivos: {text!r}")
    return values
