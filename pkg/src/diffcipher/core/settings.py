from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Any, Optional

from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class DiffCipherSettings(BaseSettings):
    """Configuration surface for simulations, solvers and attack campaigns."""

    term_cap: int = Field(
        default=2**20,
        ge=1,
        description="Maximum number of terms while iterating the transition endomorphism.",
    )
    state_space_cap: int = Field(
        default=2**24,
        ge=2,
        description="Largest state space enumerated by the orbit-based period routes.",
    )
    cnf_cut_width: int = Field(
        default=4,
        ge=3,
        le=16,
        description="Maximum XOR length before a parity constraint is cut with a fresh variable.",
    )
    threads: int = Field(default=1, ge=1, le=256)
    seed: int = Field(default=0, ge=0)
    guess_timeout_factor: float = Field(
        default=10.0,
        gt=1.0,
        description="Per-guess timeout as a multiple of the rolling median solve time.",
    )
    guess_timeout_floor_ms: int = Field(
        default=2_000,
        ge=0,
        description="Per-guess timeout used before a median is available; 0 disables timeouts.",
    )
    budget_ms: Optional[int] = Field(
        default=None,
        ge=1,
        description="Wall-clock budget for a whole guess campaign.",
    )
    degree_bound: Optional[int] = Field(default=None, ge=1)
    keystream_bits: int = Field(
        default=190,
        ge=1,
        description="Number of keystream values consumed by stream attacks.",
    )
    bit_order: str = Field(
        default="msb",
        pattern="^(msb|lsb)$",
        description="Bit order of key and iv hex strings for eSTREAM loading.",
    )
    ledger_url: Optional[str] = Field(
        default=None,
        description="SQLAlchemy URL of the campaign ledger; campaigns are not persisted when unset.",
    )
    metrics_path: Optional[Path] = Field(
        default=None,
        description="Prometheus textfile written after each campaign.",
    )
    log_level: str = Field(
        default="WARNING",
        pattern="(?i)^(debug|info|warning|error|critical)$",
    )

    model_config = SettingsConfigDict(
        env_prefix="diffcipher_",
        env_file=".env",
        env_nested_delimiter="__",
        extra="ignore",
    )

    @model_validator(mode="after")
    def _normalize(self) -> "DiffCipherSettings":
        """Normalizes the log level and checks campaign limits against each other."""
        self.log_level = self.log_level.upper()
        if self.budget_ms is not None and self.budget_ms < self.guess_timeout_floor_ms:
            raise ValueError("budget_ms must not be smaller than guess_timeout_floor_ms")
        return self

    def with_overrides(self, **overrides: Any) -> "DiffCipherSettings":
        """Returns a validated copy with the non-``None`` overrides applied."""
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return DiffCipherSettings(**values)


@lru_cache
def load_settings() -> DiffCipherSettings:
    """Loads settings from the environment once per process."""
    return DiffCipherSettings()


__all__ = ["DiffCipherSettings", "load_settings"]
