"""Application configuration loaded from environment variables."""

from __future__ import annotations

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    default_trunc: int = Field(default=4, alias="PBW_DEFAULT_TRUNC", description="--trunc 미지정 시 사용하는 N")
    trunc_ceiling: int = Field(default=6, alias="PBW_TRUNC_CEILING", description="--allow-large-trunc 없이 허용되는 최대 N")
    log_config_path: str = Field(default="logging.yaml", alias="PBW_LOG_CONFIG")
    log_level: str = Field(default="INFO", alias="PBW_LOG_LEVEL")
    data_dir: str = Field(default="data", alias="PBW_DATA_DIR")

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return cached settings instance."""

    return Settings()
