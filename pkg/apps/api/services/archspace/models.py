from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FeatureScope = Literal["per_block", "per_unit"]


class SpecError(ValueError):
    pass


def _as_number(raw: Any) -> float:
    # YAML cannot spell 2/3 exactly, so "2/3" strings are accepted.
    if isinstance(raw, str):
        return float(Fraction(raw.strip()))
    return float(raw)


class FeatureDim(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(..., min_length=1)
    options: Tuple[float, ...]
    scope: FeatureScope = "per_block"

    @field_validator("scope", mode="before")
    @classmethod
    def _normalize_scope(cls, v: Any) -> Any:
        if isinstance(v, str):
            return v.strip().lower().replace("-", "_")
        return v

    @field_validator("options", mode="before")
    @classmethod
    def _parse_options(cls, v: Any) -> Tuple[float, ...]:
        if not isinstance(v, (list, tuple)):
            raise ValueError("options must be a list")
        values = tuple(_as_number(x) for x in v)
        if not values:
            raise ValueError("options must not be empty")
        if any(not math.isfinite(x) for x in values):
            raise ValueError("options must be finite numbers")
        if len(set(values)) != len(values):
            raise ValueError("options must be distinct")
        return values


class UnitSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    index: int = Field(..., ge=0)
    depth_options: Tuple[int, ...]
    stage_width: Optional[int] = Field(default=None, gt=0)

    @field_validator("depth_options", mode="before")
    @classmethod
    def _parse_depths(cls, v: Any) -> Tuple[int, ...]:
        if not isinstance(v, (list, tuple, set)):
            raise ValueError("depth_options must be a list")
        depths = sorted({int(x) for x in v})
        if not depths:
            raise ValueError("depth_options must not be empty")
        if depths[0] < 1:
            raise ValueError("depth_options must be positive integers")
        return tuple(depths)

    @property
    def max_depth(self) -> int:
        return self.depth_options[-1]

    @property
    def min_depth(self) -> int:
        return self.depth_options[0]


class SupernetSpec(BaseModel):
    """
    Declarative architecture space: units in sequence, each holding a
    variable number of blocks, plus the categorical features varied per
    block or per unit.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(..., min_length=1)
    units: Tuple[UnitSpec, ...]
    features: Tuple[FeatureDim, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _fill_unit_indices(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        units = data.get("units")
        if isinstance(units, (list, tuple)):
            filled: List[Any] = []
            for pos, unit in enumerate(units):
                if isinstance(unit, dict) and "index" not in unit:
                    unit = {**unit, "index": pos}
                filled.append(unit)
            data = {**data, "units": filled}
        return data

    @model_validator(mode="after")
    def _check_structure(self) -> "SupernetSpec":
        if not self.units:
            raise ValueError("units must not be empty")
        for pos, unit in enumerate(self.units):
            if unit.index != pos:
                raise ValueError(f"units[{pos}].index must be {pos}")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        return self

    @property
    def block_dims(self) -> Tuple[FeatureDim, ...]:
        return tuple(f for f in self.features if f.scope == "per_block")

    @property
    def unit_dims(self) -> Tuple[FeatureDim, ...]:
        return tuple(f for f in self.features if f.scope == "per_unit")

    @property
    def block_combinations(self) -> int:
        return math.prod(len(f.options) for f in self.block_dims)

    @property
    def unit_combinations(self) -> int:
        return math.prod(len(f.options) for f in self.unit_dims)

    def feature(self, name: str) -> Optional[FeatureDim]:
        for f in self.features:
            if f.name == name:
                return f
        return None


@dataclass(frozen=True)
class ArchConfig:
    """
    One sub-network of a supernet.

    block_features[u][b] holds option indices of the per-block dims (in
    declaration order) for block b of unit u; unit_features[u] holds option
    indices of the per-unit dims.
    """

    spec_name: str
    unit_depths: Tuple[int, ...]
    block_features: Tuple[Tuple[Tuple[int, ...], ...], ...]
    unit_features: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class DepthBins:
    n_bins: int
    edges: Tuple[int, ...]


def total_depth(arch: ArchConfig) -> int:
    return sum(arch.unit_depths)


def validate_arch(spec: SupernetSpec, arch: ArchConfig) -> None:
    if arch.spec_name != spec.name:
        raise SpecError(
            f"architecture belongs to spec '{arch.spec_name}', not '{spec.name}'"
        )
    n_units = len(spec.units)
    if not (
        len(arch.unit_depths) == len(arch.block_features) == len(arch.unit_features)
        == n_units
    ):
        raise SpecError(f"architecture must describe exactly {n_units} units")

    block_dims = spec.block_dims
    unit_dims = spec.unit_dims
    for u, unit in enumerate(spec.units):
        depth = arch.unit_depths[u]
        if depth not in unit.depth_options:
            raise SpecError(f"unit {u}: depth {depth} not in {unit.depth_options}")
        blocks = arch.block_features[u]
        if len(blocks) != depth:
            raise SpecError(f"unit {u}: {len(blocks)} blocks for depth {depth}")
        for b, block in enumerate(blocks):
            _check_indices(block, block_dims, where=f"unit {u} block {b}")
        _check_indices(arch.unit_features[u], unit_dims, where=f"unit {u}")


def _check_indices(
    indices: Tuple[int, ...], dims: Tuple[FeatureDim, ...], *, where: str
) -> None:
    if len(indices) != len(dims):
        raise SpecError(f"{where}: expected {len(dims)} feature indices")
    for idx, dim in zip(indices, dims):
        if not 0 <= idx < len(dim.options):
            raise SpecError(f"{where}: option index {idx} out of range for {dim.name}")


def arch_to_dict(arch: ArchConfig) -> Dict[str, Any]:
    return {
        "spec_name": arch.spec_name,
        "unit_depths": list(arch.unit_depths),
        "block_features": [[list(b) for b in unit] for unit in arch.block_features],
        "unit_features": [list(u) for u in arch.unit_features],
    }


def arch_from_dict(data: Dict[str, Any]) -> ArchConfig:
    try:
        return ArchConfig(
            spec_name=str(data["spec_name"]),
            unit_depths=tuple(int(d) for d in data["unit_depths"]),
            block_features=tuple(
                tuple(tuple(int(i) for i in block) for block in unit)
                for unit in data["block_features"]
            ),
            unit_features=tuple(
                tuple(int(i) for i in unit) for unit in data["unit_features"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"invalid architecture record: {exc}") from exc
