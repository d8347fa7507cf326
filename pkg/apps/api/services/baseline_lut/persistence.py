from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from services.common.util import atomic_write_text
from services.dataset import FORMAT_VERSION, DatasetError, dump_records, read_records

from .bias import BiasCorrection
from .lut import LatencyLut, LutError, LutKey


class _LutHeader(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: str = "header"
    format_version: int
    kind: str = "lut"
    spec_name: str
    c0: float
    block_radix: List[int] = Field(default_factory=list)
    unit_radix: List[int] = Field(default_factory=list)
    clamped: List[Tuple[int, int, int]] = Field(default_factory=list)
    bias: Optional[Dict[str, float]] = None
    meta: Dict[str, Any] = Field(default_factory=dict)


class _LutEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: str = "entry"
    unit: int = Field(..., ge=0)
    block_combo: int = Field(..., ge=0)
    unit_combo: int = Field(..., ge=0)
    cost_ms: float


def save_lut(lut: LatencyLut, path: Path, bias: BiasCorrection | None = None) -> None:
    header = {
        "record": "header",
        "format_version": FORMAT_VERSION,
        "kind": "lut",
        "spec_name": lut.spec_name,
        "c0": lut.c0,
        "block_radix": list(lut.block_radix),
        "unit_radix": list(lut.unit_radix),
        "clamped": [list(k) for k in lut.clamped],
        "bias": None
        if bias is None
        else {"slope": bias.slope, "intercept": bias.intercept, "n_points": bias.n_points},
        "meta": dict(lut.meta),
    }
    records = [
        {"record": "entry", "unit": u, "block_combo": bc, "unit_combo": uc, "cost_ms": cost}
        for (u, bc, uc), cost in sorted(lut.entries.items())
    ]
    atomic_write_text(Path(path), dump_records(header, records))


def load_lut(path: Path) -> Tuple[LatencyLut, BiasCorrection | None]:
    path = Path(path)
    try:
        raw_header, body = read_records(path, kind="LUT")
        header = _LutHeader.model_validate(raw_header)
        entries: Dict[LutKey, float] = {}
        for raw in body:
            rec = _LutEntry.model_validate(raw)
            entries[(rec.unit, rec.block_combo, rec.unit_combo)] = rec.cost_ms
    except (DatasetError, ValidationError) as exc:
        raise LutError(f"cannot load LUT {path}: {exc}") from exc
    if header.kind != "lut":
        raise LutError(f"{path}: not a LUT file (kind={header.kind!r})")

    bias = None
    if header.bias is not None:
        bias = BiasCorrection(
            slope=header.bias["slope"],
            intercept=header.bias["intercept"],
            n_points=int(header.bias.get("n_points", 0)),
        )
    lut = LatencyLut(
        spec_name=header.spec_name,
        c0=header.c0,
        entries=entries,
        block_radix=tuple(header.block_radix),
        unit_radix=tuple(header.unit_radix),
        clamped=tuple(tuple(k) for k in header.clamped),  # type: ignore[misc]
        meta=dict(header.meta),
    )
    return lut, bias
