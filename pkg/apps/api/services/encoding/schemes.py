from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Tuple, get_args

from services.archspace import SupernetSpec

SchemeKind = Literal["fcc", "feature_count", "statistical", "feature", "one_hot"]

SCHEMES: Tuple[str, ...] = get_args(SchemeKind)

_ALIASES = {
    "fc": "feature_count",
    "feature-count": "feature_count",
    "onehot": "one_hot",
    "one-hot": "one_hot",
    "stat": "statistical",
}


class EncodingError(ValueError):
    pass


def parse_scheme(raw: str) -> SchemeKind:
    key = (raw or "").strip().lower()
    key = _ALIASES.get(key, key)
    if key not in SCHEMES:
        raise EncodingError(f"unknown encoding scheme '{raw}'")
    return key  # type: ignore[return-value]


@dataclass(frozen=True)
class EncodedVector:
    values: Tuple[float, ...]
    scheme: SchemeKind
    spec_name: str

    def __len__(self) -> int:
        return len(self.values)


def unit_length(spec: SupernetSpec, unit_index: int, scheme: SchemeKind) -> int:
    block_dims = spec.block_dims
    unit_dims = spec.unit_dims
    unit_options = sum(len(d.options) for d in unit_dims)
    max_depth = spec.units[unit_index].max_depth

    if scheme == "fcc":
        combos = spec.block_combinations if block_dims else 0
        return combos + unit_options
    if scheme == "feature_count":
        return sum(len(d.options) for d in spec.features)
    if scheme == "statistical":
        return 1 + 2 * len(block_dims) + len(unit_dims)
    if scheme == "feature":
        return max_depth * len(block_dims) + len(unit_dims)
    if scheme == "one_hot":
        slot = 1 + sum(len(d.options) for d in block_dims)
        return max_depth * slot + unit_options
    raise EncodingError(f"unknown encoding scheme '{scheme}'")


def encoding_length(spec: SupernetSpec, scheme: SchemeKind) -> int:
    return sum(unit_length(spec, u, scheme) for u in range(len(spec.units)))
