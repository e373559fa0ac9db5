"""Runtime settings read from the environment and an optional ``.env`` file."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path

from dotenv import load_dotenv

from .errors import ConfigError

ENV_PREFIX = "COHOCALC_"
LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


@dataclass(frozen=True)
class Settings:
    property_trials: int = 1000
    seed: int = 20260710
    workers: int = 1
    log_level: str = "WARNING"

    def with_overrides(self, **overrides: object) -> "Settings":
        values = {key: value for key, value in overrides.items() if value is not None}
        settings = replace(self, **values)
        _validate(settings)
        return settings


def load_settings(env_file: Path | None = None) -> Settings:
    """Read ``COHOCALC_*`` variables; a ``.env`` file never overrides the real environment."""
    if env_file is not None:
        load_dotenv(env_file, override=False)
    else:
        load_dotenv(override=False)
    defaults = Settings()
    settings = Settings(
        property_trials=_int_setting("PROPERTY_TRIALS", defaults.property_trials),
        seed=_int_setting("SEED", defaults.seed),
        workers=_int_setting("WORKERS", defaults.workers),
        log_level=os.environ.get(ENV_PREFIX + "LOG_LEVEL", defaults.log_level).strip().upper(),
    )
    _validate(settings)
    return settings


def configure_logging(settings: Settings, verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _int_setting(name: str, default: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from exc


def _validate(settings: Settings) -> None:
    if settings.property_trials < 1:
        raise ConfigError(f"{ENV_PREFIX}PROPERTY_TRIALS must be >= 1")
    if settings.workers < 1:
        raise ConfigError(f"{ENV_PREFIX}WORKERS must be >= 1")
    if settings.log_level not in LOG_LEVELS:
        raise ConfigError(f"{ENV_PREFIX}LOG_LEVEL must be one of: {', '.join(sorted(LOG_LEVELS))}")
