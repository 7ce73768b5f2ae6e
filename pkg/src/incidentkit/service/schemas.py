"""Request/response models for the analysis service.

Model documents (taxonomy, system, script, catalog, LTS) travel as plain
JSON objects; deep validation happens in the core validators, which report
structured violations instead of schema errors.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class ViolationModel(BaseModel):
    element: str
    rule: str
    message: str


class ValidateSystemRequest(BaseModel):
    taxonomy: dict | None = None
    system: dict


class ValidateScriptRequest(BaseModel):
    taxonomy: dict | None = None
    script: dict
    system: dict | None = None


class ValidateResponse(BaseModel):
    valid: bool
    violations: list[ViolationModel]


class LtsRequest(BaseModel):
    taxonomy: dict | None = None
    system: dict
    initial: str | None = None
    max_states: int = Field(default=10000, ge=1)


class ExtractRequest(BaseModel):
    taxonomy: dict | None = None
    system: dict
    instance: dict
    catalog: dict | None = None
    prefer_meta: bool = False
    kept_properties: dict[str, list[str]] | None = None


class InstantiateRequest(BaseModel):
    taxonomy: dict | None = None
    system: dict
    pattern: dict
    lts: dict
    bound: int | None = None
    workers: int = Field(default=1, ge=1)
    set_limit: int = Field(default=10000, ge=1)
    threshold: float = Field(default=0.9, ge=0.0, le=1.0)


class AnalyzeRequest(BaseModel):
    traces: list[list[str]]
    threshold: float = Field(default=0.9, ge=0.0, le=1.0)


class AnalyzeResponse(BaseModel):
    occurrence: dict[str, float]
    frequent_actions: list[str]
    shortest_length: int | None
    shortest_count: int


class PatternAddRequest(BaseModel):
    taxonomy: dict | None = None
    pattern: dict


class PatternAddResponse(BaseModel):
    id: str


class RepoEntryModel(BaseModel):
    id: str
    name: str
    hash: str
    created: str
    path: str


class HealthResponse(BaseModel):
    status: str
    version: str
