import logging

import pytest
from pydantic import ValidationError

from app.core.config import Settings, get_settings
from app.core.logging_config import LOG_FORMAT, configure_logging
from app.schemas.run_config_schema import RunConfig


def test_defaults() -> None:
    settings = get_settings()
    assert settings.app_name == "fstirling"
    assert settings.max_n == 12
    assert settings.oracle_cap == 15
    assert settings.euler_terms == 5000
    assert get_settings() is settings


def test_environment_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("FSTIRLING_MAX_N", "20")
    monkeypatch.setenv("FSTIRLING_LOG_LEVEL", "DEBUG")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.max_n == 20
    assert settings.log_level == "DEBUG"


def test_invalid_settings_are_rejected() -> None:
    with pytest.raises(ValidationError):
        Settings(max_n=0)


def test_run_config_rules() -> None:
    config = RunConfig(command="verify", max_n=4)
    assert config.output_format == "json"
    with pytest.raises(ValidationError):
        RunConfig(command="eulersum", output_format="csv")
    with pytest.raises(ValidationError):
        RunConfig(command="convpoly")
    with pytest.raises(ValidationError):
        RunConfig(command="plot")


def test_configure_logging_sets_root_level() -> None:
    configure_logging("debug")
    root = logging.getLogger()
    assert root.level == logging.DEBUG
    assert any(handler.formatter and handler.formatter._fmt == LOG_FORMAT for handler in root.handlers)
    configure_logging("not-a-level")
    assert logging.getLogger().level == logging.WARNING
