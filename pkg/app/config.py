"""Application configuration using Pydantic settings."""

import os

from pydantic_settings import BaseSettings, SettingsConfigDict


class BaseConfig(BaseSettings):
    """Base configuration shared across all environments."""

    OUTPUT_DIR: str = os.environ.get("OUTPUT_DIR", "outputs")
    PLOTS_ENABLED: bool = True
    DEFAULT_THREADS: int = 1

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )


class DevelopmentSettings(BaseConfig):
    """Development environment settings."""

    # Celery Configuration (in-process, no broker needed)
    CELERY_BROKER_URL: str = "memory://"
    CELERY_RESULT_BACKEND: str = "cache+memory://"
    CELERY_TASK_ALWAYS_EAGER: bool = True

    # Application Configuration
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "DEBUG"


class ProductionSettings(BaseConfig):
    """Production environment settings."""

    # Celery Configuration (must be set via env vars in production)
    CELERY_BROKER_URL: str
    CELERY_RESULT_BACKEND: str
    CELERY_TASK_ALWAYS_EAGER: bool = False

    # Application Configuration
    ENVIRONMENT: str = "production"
    LOG_LEVEL: str = "INFO"

    def __init__(self, **kwargs):
        # Get Celery URLs from environment
        kwargs["CELERY_BROKER_URL"] = os.environ.get(
            "CELERY_BROKER_URL", "redis://localhost:6379/0"
        )
        kwargs["CELERY_RESULT_BACKEND"] = os.environ.get(
            "CELERY_RESULT_BACKEND", "redis://localhost:6379/0"
        )

        super().__init__(**kwargs)


def get_settings() -> BaseConfig:
    """Get settings based on ENVIRONMENT env variable."""
    env = os.environ.get("ENVIRONMENT", "development").lower()

    if env == "production":
        return ProductionSettings()
    else:
        return DevelopmentSettings()


settings = get_settings()
