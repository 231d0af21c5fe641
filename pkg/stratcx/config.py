from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Pydantic v2 settings config
    model_config = SettingsConfigDict(
        env_prefix="STRATCX_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # General
    ENV: str = Field("dev", description="Environment name")
    LOG_LEVEL: str = "WARNING"  # CLI keeps stdout for JSON, logs go to stderr

    # Parallelism for verification trials (STRATCX_THREADS)
    THREADS: int = Field(1, ge=1)

    # -----------------------------------------------------------------------
    # Verification suites
    # -----------------------------------------------------------------------
    DEFAULT_SEED: int = 7
    DEFAULT_TRIALS: int = 20

    # -----------------------------------------------------------------------
    # Random witnesses
    # -----------------------------------------------------------------------
    WITNESS_ENTRY_BOUND: int = 3      # entries drawn from {-3, ..., 3}
    WITNESS_MAX_RETRIES: int = 64     # resamples before WitnessError
    RANDOM_FORM_TERMS: int = 4        # basis elements mixed into a random form

    # -----------------------------------------------------------------------
    # CLI defaults
    # -----------------------------------------------------------------------
    DEFAULT_VARIANT: Literal["minus", "plus"] = "minus"
    DEFAULT_FORMAT: Literal["json", "table", "csv"] = "json"


settings = Settings()
