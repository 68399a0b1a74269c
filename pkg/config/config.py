from typing import Any, Dict, Optional
import os
import logging

import yaml
from dotenv import find_dotenv, load_dotenv

from config.errors import ConfigError

logger = logging.getLogger(__name__)

# Environment variables consulted after the YAML file
ENV_PREFIX = 'BILIP_'
ENV_KEYS = {
    'seed': int,
    'log_level': str,
    'max_components': int,
    'materialize_limit': int,
}


class Config:
    # Default config structure
    DEFAULT_CONFIG: Dict[str, Any] = {
        'seed': 0,
        'delta_grid_denominator': 64,
        'max_components': 200_000,
        'materialize_limit': 2_000_000,
        'stress_slope_grid': 64,
        'stress_offset_grid': 1024,
        'plot_precision': 6,
        'log_level': 'WARNING',
    }

    # Report schema
    SCHEMA_VERSION: int = 1

    _settings: Dict[str, Any] = dict(DEFAULT_CONFIG)

    @classmethod
    def load(cls, path: Optional[str] = None) -> Dict[str, Any]:
        """Load defaults, then the YAML file, then the environment."""
        load_dotenv(find_dotenv(usecwd=True))
        settings = dict(cls.DEFAULT_CONFIG)

        path = path or os.environ.get(f'{ENV_PREFIX}CONFIG')
        if path:
            settings.update(cls._read_yaml(path))

        for key, cast in ENV_KEYS.items():
            raw = os.environ.get(f'{ENV_PREFIX}{key.upper()}')
            if raw is None:
                continue
            try:
                settings[key] = cast(raw)
            except ValueError:
                raise ConfigError(detail=f"{ENV_PREFIX}{key.upper()}={raw!r} is not a valid {cast.__name__}")

        cls._settings = settings
        cls.validate_config()
        logger.debug("Loaded configuration: %s", settings)
        return dict(settings)

    @classmethod
    def _read_yaml(cls, path: str) -> Dict[str, Any]:
        """Read a YAML mapping and reject unknown keys."""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except OSError as e:
            raise ConfigError(detail=f"{path}: {e}")
        except yaml.YAMLError as e:
            raise ConfigError(detail=f"{path}: {e}")

        if not isinstance(data, dict):
            raise ConfigError(detail="configuration must be a YAML dictionary")

        unknown = sorted(set(data) - set(cls.DEFAULT_CONFIG))
        if unknown:
            raise ConfigError(detail=f"unknown keys {unknown}")
        return data

    @classmethod
    def get_setting(cls, key: str, default: Any = None) -> Any:
        """Get a specific setting."""
        return cls._settings.get(key, default)

    @classmethod
    def override(cls, **kwargs: Any) -> None:
        """Apply command-line overrides on top of the loaded settings."""
        for key, value in kwargs.items():
            if value is None:
                continue
            if key not in cls.DEFAULT_CONFIG:
                raise ConfigError(detail=f"unknown key {key!r}")
            cls._settings[key] = value
        cls.validate_config()

    @classmethod
    def reset(cls) -> None:
        """Restore the built-in defaults."""
        cls._settings = dict(cls.DEFAULT_CONFIG)

    @classmethod
    def validate_config(cls) -> None:
        """Validate types and ranges of every setting."""
        settings = cls._settings
        for key in ('seed', 'delta_grid_denominator', 'max_components', 'materialize_limit',
                    'stress_slope_grid', 'stress_offset_grid', 'plot_precision'):
            if not isinstance(settings[key], int) or isinstance(settings[key], bool):
                raise ConfigError(detail=f"{key} must be an integer")
        if not 0 <= settings['seed'] < 2 ** 64:
            raise ConfigError(detail="seed must be a 64-bit unsigned integer")
        for key in ('delta_grid_denominator', 'max_components', 'materialize_limit',
                    'stress_slope_grid', 'stress_offset_grid', 'plot_precision'):
            if settings[key] < 1:
                raise ConfigError(detail=f"{key} must be positive")
        if str(settings['log_level']).upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ConfigError(detail=f"unknown log level {settings['log_level']!r}")
