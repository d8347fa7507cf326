from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence, Tuple

from services.archspace import ArchConfig, FeatureDim, SupernetSpec, UnitSpec
from services.encoding import combination_options
from services.measurement import (
    DEFAULT_RUNS_PER_ARCH,
    MeasurementBackend,
    measure_batch,
)

LOGGER = logging.getLogger(__name__)

# (unit index, per-block combination, per-unit combination)
LutKey = Tuple[int, int, int]


class LutError(RuntimeError):
    pass


@dataclass(frozen=True)
class LatencyLut:
    spec_name: str
    c0: float
    entries: Dict[LutKey, float]
    block_radix: Tuple[int, ...] = ()
    unit_radix: Tuple[int, ...] = ()
    clamped: Tuple[LutKey, ...] = ()
    meta: Dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)


def _radix_options(dims: Sequence[FeatureDim], combo: int) -> Tuple[int, ...]:
    out: List[int] = []
    for dim in reversed(dims):
        combo, option = divmod(combo, len(dim.options))
        out.append(option)
    return tuple(reversed(out))


def _radix_index(radix: Sequence[int], options: Sequence[int]) -> int:
    idx = 0
    for option, size in zip(options, radix):
        if not 0 <= option < size:
            raise LutError(f"option index {option} outside a dimension of size {size}")
        idx = idx * size + option
    return idx


def minimum_arch(spec: SupernetSpec) -> ArchConfig:
    """Every unit at its minimum depth with the first option of every dim."""
    zero_block = tuple(0 for _ in spec.block_dims)
    zero_unit = tuple(0 for _ in spec.unit_dims)
    depths = tuple(u.min_depth for u in spec.units)
    return ArchConfig(
        spec_name=spec.name,
        unit_depths=depths,
        block_features=tuple(tuple(zero_block for _ in range(d)) for d in depths),
        unit_features=tuple(zero_unit for _ in spec.units),
    )


def _with_unit(
    arch: ArchConfig, u: int, blocks: Tuple[Tuple[int, ...], ...], unit_opts: Tuple[int, ...]
) -> ArchConfig:
    depths = list(arch.unit_depths)
    depths[u] = len(blocks)
    block_features = list(arch.block_features)
    block_features[u] = blocks
    unit_features = list(arch.unit_features)
    unit_features[u] = unit_opts
    return replace(
        arch,
        unit_depths=tuple(depths),
        block_features=tuple(block_features),
        unit_features=tuple(unit_features),
    )


def _depth_step(unit: UnitSpec) -> int:
    return unit.depth_options[1] - unit.depth_options[0]


def _profiling_plan(spec: SupernetSpec) -> List[Tuple[str, ArchConfig]]:
    """
    Profiling architectures keyed by role.

    base/u/uc: the minimum arch with unit u switched to unit combo uc.
    grow/u/bc/uc: base/u/uc with one block of combo bc appended to unit u
    (as many as the step to the next legal depth when depths skip). Units
    with a single depth option get swap variants instead, with one block of
    the base replaced by combo bc.
    """
    base = minimum_arch(spec)
    zero_block = tuple(0 for _ in spec.block_dims)
    plan: List[Tuple[str, ArchConfig]] = [("min", base)]
    for u, unit in enumerate(spec.units):
        for uc in range(spec.unit_combinations):
            unit_opts = _radix_options(spec.unit_dims, uc)
            base_blocks = tuple(zero_block for _ in range(unit.min_depth))
            base_uc = _with_unit(base, u, base_blocks, unit_opts)
            if uc:
                plan.append((f"base/{u}/{uc}", base_uc))
            for bc in range(spec.block_combinations):
                block = combination_options(spec, bc)
                if len(unit.depth_options) > 1:
                    extra = (block,) * _depth_step(unit)
                    plan.append(
                        (f"grow/{u}/{bc}/{uc}", _with_unit(base_uc, u, base_blocks + extra, unit_opts))
                    )
                elif bc:
                    swapped = (block,) + base_blocks[1:]
                    plan.append((f"swap/{u}/{bc}/{uc}", _with_unit(base_uc, u, swapped, unit_opts)))
    return plan


def build_lut(
    spec: SupernetSpec,
    backend: MeasurementBackend,
    seed: int,
    *,
    runs_per_arch: int = DEFAULT_RUNS_PER_ARCH,
) -> LatencyLut:
    """
    Profile one architecture per table entry and difference them.

    An entry is the latency of the minimum architecture with one extra block
    appended to unit u, minus the minimum architecture's latency; c0 then
    absorbs the minimum architecture's own blocks and any fixed overhead.
    """
    plan = _profiling_plan(spec)
    ids = [f"lut-{role.replace('/', '-')}" for role, _ in plan]
    result = measure_batch(
        backend,
        [arch for _, arch in plan],
        runs_per_arch=runs_per_arch,
        seed=seed,
        batch_id=f"lut-{spec.name}",
        arch_ids=ids,
    )
    if result.failed:
        raise LutError(
            "LUT profiling failed: "
            + ", ".join(f"{arch_id} ({why})" for arch_id, why in result.failed)
        )
    by_id = {m.arch_id: m.latency_ms for m in result.measured}
    measured = {role: by_id[arch_id] for (role, _), arch_id in zip(plan, ids)}

    entries: Dict[LutKey, float] = {}
    clamped: List[LutKey] = []
    c0 = measured["min"]
    for u, unit in enumerate(spec.units):
        d_min = unit.min_depth
        span = _depth_step(unit) if len(unit.depth_options) > 1 else 0
        base_lat = {
            uc: measured["min"] if uc == 0 else measured[f"base/{u}/{uc}"]
            for uc in range(spec.unit_combinations)
        }
        raw: Dict[LutKey, float] = {}
        for uc in range(spec.unit_combinations):
            for bc in range(spec.block_combinations):
                if span:
                    raw[(u, bc, uc)] = (measured[f"grow/{u}/{bc}/{uc}"] - base_lat[uc]) / span
                else:
                    # Relative to (bc=0, uc=0); shifted to non-negative below.
                    swap = 0.0 if bc == 0 else measured[f"swap/{u}/{bc}/{uc}"] - base_lat[uc]
                    raw[(u, bc, uc)] = (base_lat[uc] - base_lat[0]) / d_min + swap
        if not span:
            floor = min(raw.values())
            raw = {k: v - floor for k, v in raw.items()}
        for key, value in raw.items():
            if value < 0:
                clamped.append(key)
                value = 0.0
            entries[key] = value
        c0 -= d_min * entries[(u, 0, 0)]

    if clamped:
        LOGGER.warning(
            "LUT for %s: %d negative entries clamped to 0: %s",
            spec.name,
            len(clamped),
            ", ".join(str(k) for k in clamped[:10]),
        )
    LOGGER.info("built LUT for %s: %d entries, c0=%.6f ms", spec.name, len(entries), c0)
    return LatencyLut(
        spec_name=spec.name,
        c0=c0,
        entries=entries,
        block_radix=tuple(len(d.options) for d in spec.block_dims),
        unit_radix=tuple(len(d.options) for d in spec.unit_dims),
        clamped=tuple(clamped),
        meta={
            "seed": seed,
            "runs_per_arch": runs_per_arch,
            "backend_id": result.backend_id,
            "profiled": len(plan),
        },
    )


def lut_predict(lut: LatencyLut, arch: ArchConfig) -> float:
    if arch.spec_name != lut.spec_name:
        raise LutError(f"architecture of '{arch.spec_name}' on a LUT for '{lut.spec_name}'")
    total = lut.c0
    for u, blocks in enumerate(arch.block_features):
        uc = _radix_index(lut.unit_radix, arch.unit_features[u])
        for block in blocks:
            key = (u, _radix_index(lut.block_radix, block), uc)
            try:
                total += lut.entries[key]
            except KeyError:
                raise LutError(f"LUT has no entry for {key}") from None
    return total
