"""Engine configuration using Pydantic Settings."""

from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

SplitPolicy = Literal["paper-split", "enumerate"]


class Settings(BaseSettings):
    """Engine settings loaded from environment variables.

    All settings have defaults that reproduce the m=5 computation, and each can be
    overridden via environment variables. Invalid values fail fast at startup.

    Example:
        >>> settings = Settings()
        >>> settings.SPLIT_POLICY
        'paper-split'
        >>> settings.EXTENSION_ENUMERATION_LIMIT >= 1
        True
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Extension and exact-sequence solving
    SPLIT_POLICY: SplitPolicy = Field(
        default="paper-split",
        description="How K0 of the pruned complex resolves its extension (paper-split or enumerate)",
    )
    EXTENSION_ENUMERATION_LIMIT: int = Field(
        default=65536,
        description="Maximum number of extension classes enumerated by solve_extension",
        ge=1,
        le=10_000_000,
    )
    SIX_TERM_WORKERS: int = Field(
        default=1,
        description="Worker threads for rank-assignment enumeration in the six-term solver",
        ge=1,
        le=64,
    )

    # Arithmetic
    SINGULAR_SEARCH_BOUND: int = Field(
        default=50,
        description="Default norm bound for the singular-point witness search",
        ge=1,
        le=1_000_000,
    )

    # Output
    JSON_INDENT: int = Field(
        default=2,
        description="Indentation of machine-readable reports and emitted fixtures",
        ge=0,
        le=8,
    )

    # Logging Configuration
    LOG_LEVEL: str = Field(
        default="WARNING",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate that LOG_LEVEL is a valid logging level.

        Args:
            v: The log level string to validate

        Returns:
            The uppercase log level string

        Raises:
            ValueError: If the log level is invalid

        Example:
            >>> Settings(LOG_LEVEL="info").LOG_LEVEL
            'INFO'
        """
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"LOG_LEVEL must be one of {valid_levels}, got {v}")
        return v_upper


# Global settings instance
settings = Settings()
