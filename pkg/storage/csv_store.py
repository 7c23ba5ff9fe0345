"""
================================================================================
                    PERSISTENCIA DE RESULTADOS EN CSV
================================================================================
Todos los reales se escriben con 17 digitos significativos para que dos
ejecuciones con la misma semilla produzcan archivos identicos byte a byte.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from config import DELAY_CSV_COLUMNS, ROUND_CSV_COLUMNS, SWEEP_CSV_COLUMNS, get_settings
from storage.models import RoundLog, SweepRow


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_real(value: float) -> str:
    """Real con csv_digits digitos significativos"""
    return format(float(value), f".{get_settings().csv_digits}g")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def _write_rows(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(value) for value in row])
            count += 1
    logger.info("Escritas %d filas en %s", count, path)
    return path


def write_rounds(path: PathLike, rounds: Iterable[RoundLog]) -> Path:
    """CSV por ronda: t, loss, cum_loss, arrivals, tau, cum_regret"""
    return _write_rows(
        path,
        ROUND_CSV_COLUMNS,
        ([getattr(record, column) for column in ROUND_CSV_COLUMNS] for record in rounds),
    )


def write_sweep(path: PathLike, rows: Iterable[SweepRow]) -> Path:
    """CSV de barrido: una fila por (T, d, semilla)"""
    return _write_rows(
        path,
        SWEEP_CSV_COLUMNS,
        ([getattr(row, column) for column in SWEEP_CSV_COLUMNS] for row in rows),
    )


def write_stream(path: PathLike, stream) -> Path:
    """Parametros de cada f_t (g_t o theta_t), una fila por ronda"""
    parameters = stream.parameters()
    columns = ["t"] + list(parameters[0].keys())
    rows = ([t] + list(values.values()) for t, values in enumerate(parameters, start=1))
    return _write_rows(path, columns, rows)


def write_delays(path: PathLike, schedule) -> Path:
    """d_t y la ronda de llegada t + d_t - 1"""
    arrivals = schedule.arrival_rounds()
    rows = (
        [t, int(d_t), int(arrival)]
        for t, (d_t, arrival) in enumerate(zip(schedule.delays, arrivals), start=1)
    )
    return _write_rows(path, DELAY_CSV_COLUMNS, rows)


def read_sweep(path: PathLike) -> List[SweepRow]:
    """Lee un CSV de barrido escrito por write_sweep"""
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return [SweepRow.model_validate(row) for row in csv.DictReader(handle)]


def read_rounds(path: PathLike) -> List[RoundLog]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return [RoundLog.model_validate(row) for row in csv.DictReader(handle)]
