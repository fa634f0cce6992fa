"""Configuration settings for the informative path planning service."""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="IPP_", case_sensitive=False, extra="ignore"
    )

    # Service configuration
    host: str = Field(default="0.0.0.0")
    port: int = Field(default=8004)
    environment: str = Field(default="development", description="development|test|production")
    log_level: str = Field(default="INFO")

    # Bench configuration
    output_dir: str = Field(default="results")
    workers: int = Field(default=1, ge=1)
    deterministic_iterations: Optional[int] = Field(
        default=200, ge=1, description="Planner iterations per cycle in the test environment"
    )


# Global settings instance
settings = Settings()
