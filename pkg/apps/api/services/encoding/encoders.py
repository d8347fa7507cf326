from __future__ import annotations

from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from services.archspace import ArchConfig, SpecError, SupernetSpec, validate_arch

from .schemes import (
    EncodedVector,
    EncodingError,
    SchemeKind,
    encoding_length,
    parse_scheme,
)


def _checked(spec: SupernetSpec, arch: ArchConfig) -> None:
    try:
        validate_arch(spec, arch)
    except SpecError as exc:
        raise EncodingError(str(exc)) from exc


def combination_index(spec: SupernetSpec, block: Sequence[int]) -> int:
    # Mixed radix, first declared dim most significant (kernel-major).
    idx = 0
    for option, dim in zip(block, spec.block_dims):
        idx = idx * len(dim.options) + option
    return idx


def combination_options(spec: SupernetSpec, combo: int) -> Tuple[int, ...]:
    out: List[int] = []
    for dim in reversed(spec.block_dims):
        combo, option = divmod(combo, len(dim.options))
        out.append(option)
    return tuple(reversed(out))


def _unit_dim_counts(spec: SupernetSpec, arch: ArchConfig, u: int) -> List[float]:
    out: List[float] = []
    depth = arch.unit_depths[u]
    for dim, option in zip(spec.unit_dims, arch.unit_features[u]):
        slots = [0.0] * len(dim.options)
        slots[option] = float(depth)
        out.extend(slots)
    return out


def _fcc(spec: SupernetSpec, arch: ArchConfig) -> List[float]:
    out: List[float] = []
    has_block_dims = bool(spec.block_dims)
    for u in range(len(spec.units)):
        if has_block_dims:
            hist = [0.0] * spec.block_combinations
            for block in arch.block_features[u]:
                hist[combination_index(spec, block)] += 1.0
            out.extend(hist)
        out.extend(_unit_dim_counts(spec, arch, u))
    return out


def _feature_count(spec: SupernetSpec, arch: ArchConfig) -> List[float]:
    out: List[float] = []
    block_pos = {d.name: i for i, d in enumerate(spec.block_dims)}
    unit_pos = {d.name: i for i, d in enumerate(spec.unit_dims)}
    for u in range(len(spec.units)):
        depth = arch.unit_depths[u]
        for dim in spec.features:
            slots = [0.0] * len(dim.options)
            if dim.scope == "per_block":
                k = block_pos[dim.name]
                for block in arch.block_features[u]:
                    slots[block[k]] += 1.0
            else:
                slots[arch.unit_features[u][unit_pos[dim.name]]] = float(depth)
            out.extend(slots)
    return out


def _statistical(spec: SupernetSpec, arch: ArchConfig) -> List[float]:
    out: List[float] = []
    for u in range(len(spec.units)):
        blocks = arch.block_features[u]
        out.append(float(arch.unit_depths[u]))
        for k, dim in enumerate(spec.block_dims):
            values = np.array([dim.options[b[k]] for b in blocks], dtype=float)
            out.append(float(values.mean()))
            out.append(float(values.std()))
        for dim, option in zip(spec.unit_dims, arch.unit_features[u]):
            out.append(float(dim.options[option]))
    return out


def _feature(spec: SupernetSpec, arch: ArchConfig) -> List[float]:
    out: List[float] = []
    block_dims = spec.block_dims
    for u, unit in enumerate(spec.units):
        blocks = arch.block_features[u]
        for slot in range(unit.max_depth):
            if slot < len(blocks):
                out.extend(float(d.options[i]) for d, i in zip(block_dims, blocks[slot]))
            else:
                out.extend(0.0 for _ in block_dims)
        for dim, option in zip(spec.unit_dims, arch.unit_features[u]):
            out.append(float(dim.options[option]))
    return out


def _one_hot(spec: SupernetSpec, arch: ArchConfig) -> List[float]:
    out: List[float] = []
    block_dims = spec.block_dims
    for u, unit in enumerate(spec.units):
        blocks = arch.block_features[u]
        for slot in range(unit.max_depth):
            active = slot < len(blocks)
            out.append(1.0 if active else 0.0)
            for k, dim in enumerate(block_dims):
                bits = [0.0] * len(dim.options)
                if active:
                    bits[blocks[slot][k]] = 1.0
                out.extend(bits)
        for dim, option in zip(spec.unit_dims, arch.unit_features[u]):
            bits = [0.0] * len(dim.options)
            bits[option] = 1.0
            out.extend(bits)
    return out


_ENCODERS: Dict[str, Callable[[SupernetSpec, ArchConfig], List[float]]] = {
    "fcc": _fcc,
    "feature_count": _feature_count,
    "statistical": _statistical,
    "feature": _feature,
    "one_hot": _one_hot,
}


def encode(spec: SupernetSpec, arch: ArchConfig, scheme: str) -> EncodedVector:
    kind: SchemeKind = parse_scheme(scheme)
    _checked(spec, arch)
    values = _ENCODERS[kind](spec, arch)
    return EncodedVector(values=tuple(values), scheme=kind, spec_name=spec.name)


def encode_fcc(spec: SupernetSpec, arch: ArchConfig) -> EncodedVector:
    return encode(spec, arch, "fcc")


def encode_feature_count(spec: SupernetSpec, arch: ArchConfig) -> EncodedVector:
    return encode(spec, arch, "feature_count")


def encode_statistical(spec: SupernetSpec, arch: ArchConfig) -> EncodedVector:
    return encode(spec, arch, "statistical")


def encode_feature(spec: SupernetSpec, arch: ArchConfig) -> EncodedVector:
    return encode(spec, arch, "feature")


def encode_one_hot(spec: SupernetSpec, arch: ArchConfig) -> EncodedVector:
    return encode(spec, arch, "one_hot")


def encode_many(
    spec: SupernetSpec, archs: Sequence[ArchConfig], scheme: str
) -> np.ndarray:
    kind = parse_scheme(scheme)
    fn = _ENCODERS[kind]
    rows = []
    for arch in archs:
        _checked(spec, arch)
        rows.append(fn(spec, arch))
    if not rows:
        return np.zeros((0, encoding_length(spec, kind)), dtype=float)
    return np.asarray(rows, dtype=float)


def decode_one_hot(spec: SupernetSpec, vector: Sequence[float]) -> ArchConfig:
    """Inverse of the one-hot encoding."""
    values = [float(v) for v in vector]
    if len(values) != encoding_length(spec, "one_hot"):
        raise EncodingError("one-hot vector length does not match the search space")

    pos = 0

    def take(n: int) -> List[float]:
        nonlocal pos
        chunk = values[pos : pos + n]
        pos += n
        return chunk

    def hot(bits: List[float], what: str) -> int:
        ones = [i for i, b in enumerate(bits) if b == 1.0]
        if len(ones) != 1 or sum(bits) != 1.0:
            raise EncodingError(f"{what}: expected exactly one active option")
        return ones[0]

    depths: List[int] = []
    blocks_out: List[Tuple[Tuple[int, ...], ...]] = []
    units_out: List[Tuple[int, ...]] = []
    for u, unit in enumerate(spec.units):
        blocks: List[Tuple[int, ...]] = []
        for slot in range(unit.max_depth):
            active = take(1)[0]
            options: List[int] = []
            for dim in spec.block_dims:
                bits = take(len(dim.options))
                if active == 1.0:
                    options.append(hot(bits, f"unit {u} slot {slot} {dim.name}"))
                elif any(bits):
                    raise EncodingError(f"unit {u} slot {slot}: inactive slot has bits")
            if active == 1.0:
                if len(blocks) != slot:
                    raise EncodingError(f"unit {u}: active slots must be contiguous")
                blocks.append(tuple(options))
        unit_opts = tuple(
            hot(take(len(dim.options)), f"unit {u} {dim.name}") for dim in spec.unit_dims
        )
        depths.append(len(blocks))
        blocks_out.append(tuple(blocks))
        units_out.append(unit_opts)

    arch = ArchConfig(
        spec_name=spec.name,
        unit_depths=tuple(depths),
        block_features=tuple(blocks_out),
        unit_features=tuple(units_out),
    )
    _checked(spec, arch)
    return arch
