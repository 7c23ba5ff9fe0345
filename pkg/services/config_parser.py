"""
================================================================================
                    PARSER DE ARCHIVOS DE EXPERIMENTO
================================================================================
Formato: encabezados [problem], [losses], [delays], [run]; lineas
`clave = valor`; comentarios con `#`. Claves desconocidas son errores.
"""

import logging
from pathlib import Path
from typing import Dict, Tuple, Union

from pydantic import ValidationError

from config import CONFIG_SECTIONS
from errors import ConfigError
from storage.models import DelaySpec, ExperimentConfig, RunSpec, SetSpec, StreamSpec


logger = logging.getLogger(__name__)

SECTION_MODELS = {
    "problem": SetSpec,
    "losses": StreamSpec,
    "delays": DelaySpec,
    "run": RunSpec,
}

REQUIRED_SECTIONS = ("problem", "losses", "run")


def _allowed_keys(model) -> Dict[str, str]:
    """Clave del archivo -> nombre del campo"""
    keys = {}
    for name, info in model.model_fields.items():
        keys[info.alias or name] = name
    return keys


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_config(text: str) -> ExperimentConfig:
    """
    Parsea y valida un archivo de experimento.

    Args:
        text: Contenido del archivo

    Returns:
        ExperimentConfig validado con valores por defecto aplicados

    Raises:
        ConfigError: con el numero de linea del problema
    """
    sections: Dict[str, Dict[str, str]] = {}
    key_lines: Dict[Tuple[str, str], int] = {}
    header_lines: Dict[str, int] = {}
    current = None

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue

        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"encabezado de seccion mal formado: {raw.strip()!r}", number)
            name = line[1:-1].strip()
            if name not in CONFIG_SECTIONS:
                raise ConfigError(
                    f"seccion desconocida [{name}]; validas: {', '.join(CONFIG_SECTIONS)}", number
                )
            if name in sections:
                raise ConfigError(f"seccion [{name}] duplicada", number)
            sections[name] = {}
            header_lines[name] = number
            current = name
            continue

        if "=" not in line:
            raise ConfigError(f"se esperaba `clave = valor`, se encontro {raw.strip()!r}", number)
        if current is None:
            raise ConfigError("clave fuera de una seccion", number)

        key, value = (part.strip() for part in line.split("=", 1))
        allowed = _allowed_keys(SECTION_MODELS[current])
        if key not in allowed:
            raise ConfigError(
                f"clave desconocida `{key}` en [{current}]; validas: {', '.join(sorted(allowed))}",
                number,
            )
        if key in sections[current]:
            raise ConfigError(f"clave `{key}` repetida en [{current}]", number)
        if value == "":
            raise ConfigError(f"clave `{key}` sin valor", number)
        sections[current][key] = value
        key_lines[(current, key)] = number

    for name in REQUIRED_SECTIONS:
        if name not in sections:
            raise ConfigError(f"falta la seccion obligatoria [{name}]", None)

    try:
        return ExperimentConfig.model_validate(sections)
    except ValidationError as exc:
        raise _to_config_error(exc, key_lines, header_lines) from exc


def _to_config_error(
    exc: ValidationError,
    key_lines: Dict[Tuple[str, str], int],
    header_lines: Dict[str, int],
) -> ConfigError:
    error = exc.errors()[0]
    location = [str(part) for part in error.get("loc", ())]
    message = error.get("msg", "valor invalido")
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]

    section = location[0] if location else None
    key = location[1] if len(location) > 1 else None

    if section in SECTION_MODELS and key is not None:
        # loc usa el alias (G, T, set) cuando existe
        field_keys = {v: k for k, v in _allowed_keys(SECTION_MODELS[section]).items()}
        file_key = key if (section, key) in key_lines else field_keys.get(key, key)
        line = key_lines.get((section, file_key), header_lines.get(section))
        if error.get("type") == "missing":
            return ConfigError(f"falta la clave obligatoria `{file_key}` en [{section}]", line)
        return ConfigError(f"[{section}] {file_key}: {message}", line)

    if section in SECTION_MODELS:
        return ConfigError(f"[{section}]: {message}", header_lines.get(section))

    # errores de compatibilidad entre secciones
    line = key_lines.get(("run", "algorithm"), header_lines.get("run"))
    return ConfigError(message, line)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Lee y parsea un archivo de experimento"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"no se pudo leer {path}: {exc}") from exc
    config = parse_config(text)
    logger.info("Configuracion cargada desde %s (%s)", path, config.run.algorithm.value)
    return config
