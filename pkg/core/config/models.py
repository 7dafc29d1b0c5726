"""Pydantic models describing runtime configuration."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator


class PolicyConfig(BaseModel):
    """Truncation orders applied to every series computation."""

    h_order: PositiveInt = 8
    filt_cap: PositiveInt = 6
    depth: PositiveInt = 12
    certify: bool = True

    @field_validator("filt_cap")
    @classmethod
    def validate_cap(cls, value: int) -> int:
        if value < 3:
            raise ValueError("filtration cap must be at least 3 to see the Johnson layer")
        return value


class TruncationPolicy(PolicyConfig):
    """Immutable policy tag attached to every emitted equality."""

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_config(cls, config: PolicyConfig) -> "TruncationPolicy":
        return cls(**config.model_dump())

    def describe(self) -> str:
        return f"up to (h^{self.h_order}, F^{self.filt_cap}), depth {self.depth}"


class CacheConfig(BaseModel):
    """Product cache settings."""

    enabled: bool = True
    directory: Optional[str] = None
    memory_entries: PositiveInt = 4096


class CertificateConfig(BaseModel):
    """Bounds for the (ker eps)^k membership search."""

    model_config = ConfigDict(frozen=True)

    max_factors: PositiveInt = 3
    twist_depth: int = Field(default=2, ge=0)
    max_generators: PositiveInt = 24


class ReportConfig(BaseModel):
    """Output preferences for reports."""

    format: Literal["json", "text"] = "text"


class Settings(BaseModel):
    """Root settings object consumed by the session service."""

    policy: PolicyConfig = Field(default_factory=PolicyConfig)
    cache: CacheConfig = Field(default_factory=CacheConfig)
    certificates: CertificateConfig = Field(default_factory=CertificateConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)
    surface_file: Optional[str] = None

    def truncation_policy(self) -> TruncationPolicy:
        return TruncationPolicy.from_config(self.policy)
