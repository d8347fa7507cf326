from __future__ import annotations

from typing import Dict, List

from pydantic import BaseModel


class BinOut(BaseModel):
    index: int
    min_total: int
    max_total: int


class SpaceOut(BaseModel):
    name: str
    units: int
    size: str
    size_short: str
    min_total_depth: int
    max_total_depth: int
    encoding_lengths: Dict[str, int]
    bins: List[BinOut]
