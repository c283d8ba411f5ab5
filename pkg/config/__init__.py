"""
Lie Workbench - Configuration Loader

Loads defaults from config.yaml and optional LIEF_* overrides from the
environment (a .env file in the project root is read if present).
Precedence for field and class: command-line flag > script declaration >
environment > YAML.
"""

import os
from pathlib import Path
from typing import Any, Optional

import yaml
from dotenv import load_dotenv


class ConfigError(Exception):
    """Custom exception for configuration errors."""
    pass


class Config:
    """Configuration manager for the lief workbench."""

    def __init__(self, config_path: Optional[str] = None, env_path: Optional[str] = None):
        """
        Initialize configuration loader.

        Args:
            config_path: Path to config.yaml file (default: config/config.yaml)
            env_path: Path to .env file (default: .env in project root)
        """
        self.project_root = Path(__file__).parent.parent

        if env_path is None:
            env_path = self.project_root / ".env"
        load_dotenv(env_path)

        if config_path is None:
            config_path = self.project_root / "config" / "config.yaml"

        with open(config_path, 'r') as f:
            self.config = yaml.safe_load(f) or {}

    # Arithmetic
    @property
    def default_field(self) -> str:
        """Field label from LIEF_FIELD or the YAML default (Q or Fp:<p>)."""
        return os.getenv('LIEF_FIELD') or self.get('arithmetic.default_field', 'Q')

    @property
    def default_prime(self) -> int:
        return int(self.get('arithmetic.default_prime', 32003))

    # Truncation
    @property
    def default_class(self) -> int:
        """Nilpotency class from LIEF_CLASS or the YAML default."""
        value = os.getenv('LIEF_CLASS') or self.get('truncation.default_class', 4)
        try:
            return int(value)
        except ValueError as e:
            raise ConfigError(f"LIEF_CLASS must be an integer, got '{value}'") from e

    @property
    def max_class(self) -> int:
        return int(self.get('truncation.max_class', 8))

    @property
    def betti_field_precheck(self) -> bool:
        return bool(self.get('homology.betti_field_precheck', False))

    # Suites
    @property
    def suite_seed(self) -> int:
        return int(self.get('suites.seed', 0))

    @property
    def randomized_trials(self) -> int:
        return int(self.get('suites.randomized_trials', 20))

    # Reports
    @property
    def report_indent(self) -> int:
        return int(self.get('reports.indent', 2))

    @property
    def include_timings(self) -> bool:
        return bool(self.get('reports.include_timings', False))

    # Logging
    @property
    def log_level(self) -> str:
        return (os.getenv('LIEF_LOG_LEVEL') or self.get('logging.level', 'INFO')).upper()

    @property
    def log_format(self) -> str:
        return self.get('logging.format', '[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s')

    @property
    def log_date_format(self) -> str:
        return self.get('logging.date_format', '%Y-%m-%d %H:%M:%S')

    @property
    def log_to_file(self) -> bool:
        return bool(self.get('logging.log_to_file', False))

    @property
    def log_file_path(self) -> Path:
        return self.project_root / self.get('logging.log_file', 'logs/lief.log')

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-notation key path.

        Args:
            key_path: Dot-notation path (e.g., 'truncation.default_class')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value = self.config
        for key in key_path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def resolve_field(self, flag: Optional[str] = None, script: Optional[str] = None) -> str:
        """Field label by precedence: flag, script, environment, YAML."""
        label = flag or script or self.default_field
        if label == "Fp":
            label = f"Fp:{self.default_prime}"
        return label

    def resolve_class(self, flag: Optional[int] = None, script: Optional[int] = None) -> int:
        """
        Nilpotency class by precedence: flag, script, environment, YAML.

        Raises:
            ConfigError: If the class is below 1 or above truncation.max_class
        """
        c = flag if flag is not None else script if script is not None else self.default_class
        if c < 1 or c > self.max_class:
            raise ConfigError(f"Class {c} outside 1..{self.max_class}")
        return c


# Global config instance (loaded on first use)
_config_instance = None


def get_config() -> Config:
    """
    Get global configuration instance (singleton pattern).

    Returns:
        Config instance
    """
    global _config_instance
    if _config_instance is None:
        _config_instance = Config()
    return _config_instance


def load_config(config_path: Optional[str] = None, env_path: Optional[str] = None) -> Config:
    """
    Load configuration from files.

    Args:
        config_path: Path to config.yaml file
        env_path: Path to .env file

    Returns:
        Config instance
    """
    return Config(config_path=config_path, env_path=env_path)
