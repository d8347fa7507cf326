from __future__ import annotations

from typing import List

from pydantic import BaseModel, Field


class ArchIn(BaseModel):
    unit_depths: List[int] = Field(..., min_length=1)
    block_features: List[List[List[int]]]
    unit_features: List[List[int]] = Field(default_factory=list)


class PredictionIn(BaseModel):
    archs: List[ArchIn] = Field(..., min_length=1, max_length=10000)


class PredictionOut(BaseModel):
    spec: str
    scheme: str
    latencies_ms: List[float]
