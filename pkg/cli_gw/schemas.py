"""Pydantic models describing command-line reports."""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class PolicyView(BaseModel):
    h_order: int
    filt_cap: int
    depth: int
    certify: bool = True


class ComputeResponse(BaseModel):
    """Result of ``skein-forge compute``."""

    expression: str
    surface: str
    policy: PolicyView
    kind: str
    value: Any


class CheckView(BaseModel):
    name: str
    verdict: str
    detail: str
    terms: Optional[Dict[str, Any]] = None
    certified_degree: Optional[int] = None
    disk_eval: Optional[Dict[str, Any]] = None
    panel_norms: Dict[str, Any] = Field(default_factory=dict)


class VerifyResponse(BaseModel):
    """One relation verdict with its evidence."""

    relation: str
    surface: str
    instance: Dict[str, str]
    policy: PolicyView
    disk_eval: Optional[Dict[str, Any]] = None
    panel_norms: Dict[str, Any] = Field(default_factory=dict)
    geometric: Optional[bool] = None
    verdict: str
    detail: str
    notes: List[str] = Field(default_factory=list)
    checks: List[CheckView] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "inconclusive": 2}.get(self.verdict, 1)


class VerifyBatchResponse(BaseModel):
    reports: List[VerifyResponse]

    @property
    def exit_code(self) -> int:
        codes = [report.exit_code for report in self.reports]
        if 1 in codes:
            return 1
        return 2 if 2 in codes else 0


class SurfaceView(BaseModel):
    name: str
    order: List[str]
    genus: int
    boundary: int
    marked_points: int = 0
    curves: List[str] = Field(default_factory=list)


class SurfacesResponse(BaseModel):
    surfaces: List[SurfaceView]
    relations: List[str]


class CacheStatsResponse(BaseModel):
    directory: Optional[str] = None
    records: int = 0
    bytes: int = 0
    removed: Optional[int] = None
