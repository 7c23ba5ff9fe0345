"""
================================================================================
                    DELAYED OFW TOOLKIT - CONFIGURACION
================================================================================
"""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configuracion central del toolkit (variables DOFW_* o archivo .env)"""

    model_config = SettingsConfigDict(
        env_prefix="DOFW_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Tolerancias numericas
    membership_tol: float = 1e-9

    # Oraculos
    grid_step: float = 1e-4
    offline_fw_max_iter: int = 100_000
    offline_fw_gap_tol: float = 1e-8

    # Salida
    csv_digits: int = 17
    output_dir: str = "results"

    # Barridos
    sweep_workers: int = 1

    # Logging
    log_level: str = "INFO"
    log_format: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@lru_cache()
def get_settings() -> Settings:
    """Obtiene la configuracion cacheada"""
    return Settings()


# Secciones y columnas de los archivos de experimento
CONFIG_SECTIONS = ("problem", "losses", "delays", "run")

ROUND_CSV_COLUMNS = ("t", "loss", "cum_loss", "arrivals", "tau", "cum_regret")

SWEEP_CSV_COLUMNS = ("T", "d_max", "algo", "set", "seed", "regret", "wall_ms")

DELAY_CSV_COLUMNS = ("t", "d_t", "arrival")

# Codigos de salida del CLI
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_INVARIANT_VIOLATION = 3
