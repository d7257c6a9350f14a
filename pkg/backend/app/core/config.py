from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


ENV_FILE = Path(__file__).resolve().parents[3] / ".env"


class Settings(BaseSettings):
    app_name: str = "fstirling"
    max_n: int = Field(default=12, ge=1)
    oracle_cap: int = Field(default=15, ge=1)
    direct_sum_limit: int = Field(default=2000, ge=1)
    euler_terms: int = Field(default=5000, ge=1)
    decimal_digits: int = Field(default=12, ge=1)
    log_level: str = "WARNING"

    model_config = SettingsConfigDict(
        env_file=str(ENV_FILE), env_file_encoding="utf-8", env_prefix="FSTIRLING_"
    )


@lru_cache
def get_settings() -> Settings:
    return Settings()
