"""
Unit tests for Configuration Loader

Tests YAML defaults, LIEF_* environment overrides and the precedence used
to pick the run's field and class.
"""

import pytest
from pathlib import Path
import sys

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import Config, ConfigError, get_config, load_config


@pytest.fixture
def clean_env(monkeypatch):
    """Fixture removing LIEF_* overrides."""
    for key in ("LIEF_FIELD", "LIEF_CLASS", "LIEF_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    return monkeypatch


@pytest.fixture
def custom_config(tmp_path, clean_env):
    """Fixture for a config with a small class ceiling."""
    path = tmp_path / "config.yaml"
    path.write_text(
        "arithmetic:\n  default_field: \"Fp:5\"\n  default_prime: 11\n"
        "truncation:\n  default_class: 2\n  max_class: 3\n",
        encoding="utf-8",
    )
    return load_config(config_path=str(path), env_path=str(tmp_path / ".env"))


class TestDefaults:
    """Tests for the bundled config.yaml."""

    def test_bundled_values(self, clean_env):
        """Q, class 4 and a seeded suite run."""
        config = Config()
        assert config.default_field == "Q"
        assert config.default_class == 4
        assert config.max_class == 8
        assert config.default_prime == 32003
        assert config.include_timings is False
        assert config.report_indent == 2

    def test_dot_path_lookup(self, clean_env):
        """Missing keys fall back to the default."""
        config = Config()
        assert config.get("truncation.default_class") == 4
        assert config.get("truncation.nope", 7) == 7

    def test_singleton(self):
        """get_config returns one shared instance."""
        assert get_config() is get_config()


class TestPrecedence:
    """Tests for field and class resolution."""

    def test_field_order(self, custom_config):
        """Flag beats script beats the configured default."""
        assert custom_config.resolve_field("Q", "Fp:7") == "Q"
        assert custom_config.resolve_field(None, "Fp:7") == "Fp:7"
        assert custom_config.resolve_field() == "Fp:5"

    def test_bare_fp_uses_default_prime(self, custom_config):
        """Fp without a prime takes arithmetic.default_prime."""
        assert custom_config.resolve_field("Fp") == "Fp:11"

    def test_class_order(self, custom_config):
        """Flag beats script beats the configured default."""
        assert custom_config.resolve_class(1, 3) == 1
        assert custom_config.resolve_class(None, 3) == 3
        assert custom_config.resolve_class() == 2

    @pytest.mark.parametrize("c", [0, 4])
    def test_class_range(self, custom_config, c):
        """Classes outside 1..max_class are rejected."""
        with pytest.raises(ConfigError):
            custom_config.resolve_class(c)


class TestEnvironment:
    """Tests for LIEF_* overrides."""

    def test_environment_beats_yaml(self, custom_config, clean_env):
        """LIEF_FIELD and LIEF_CLASS replace the YAML defaults."""
        clean_env.setenv("LIEF_FIELD", "Q")
        clean_env.setenv("LIEF_CLASS", "3")
        assert custom_config.resolve_field() == "Q"
        assert custom_config.resolve_class() == 3

    def test_script_beats_environment(self, custom_config, clean_env):
        """A script declaration wins over the environment."""
        clean_env.setenv("LIEF_CLASS", "3")
        assert custom_config.resolve_class(None, 1) == 1

    def test_bad_class(self, custom_config, clean_env):
        """A non-integer LIEF_CLASS is a configuration error."""
        clean_env.setenv("LIEF_CLASS", "three")
        with pytest.raises(ConfigError):
            custom_config.default_class

    def test_log_level(self, custom_config, clean_env):
        """LIEF_LOG_LEVEL is upper-cased."""
        clean_env.setenv("LIEF_LOG_LEVEL", "debug")
        assert custom_config.log_level == "DEBUG"
