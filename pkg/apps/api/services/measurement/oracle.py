from __future__ import annotations

import math
from typing import List, Optional

import numpy as np

from services.archspace import ArchConfig, FeatureDim, SupernetSpec, total_depth

from .types import OracleParams

KERNEL_FEATURE = "kernel_size"
EXPANSION_FEATURE = "expansion_ratio"


def _block_values(
    spec: SupernetSpec, arch: ArchConfig, u: int, name: str, default: float
) -> List[float]:
    depth = arch.unit_depths[u]
    dim: Optional[FeatureDim] = spec.feature(name)
    if dim is None:
        return [default] * depth
    if dim.scope == "per_unit":
        k = [d.name for d in spec.unit_dims].index(name)
        return [dim.options[arch.unit_features[u][k]]] * depth
    k = [d.name for d in spec.block_dims].index(name)
    return [dim.options[block[k]] for block in arch.block_features[u]]


def block_cost(
    params: OracleParams, scale: float, kernel: float, expansion: float
) -> float:
    return scale * (params.a1 * kernel * kernel + params.a2) * (params.a3 + expansion)


def unit_scale(spec: SupernetSpec, u: int, params: OracleParams) -> float:
    width = spec.units[u].stage_width
    return 1.0 if width is None else width / params.width_ref


def kernel_transitions(spec: SupernetSpec, arch: ArchConfig) -> int:
    count = 0
    for u in range(len(spec.units)):
        kernels = _block_values(spec, arch, u, KERNEL_FEATURE, 1.0)
        count += sum(1 for a, b in zip(kernels, kernels[1:]) if a != b)
    return count


def oracle_mean(spec: SupernetSpec, arch: ArchConfig, params: OracleParams) -> float:
    """
    Noise-free latency: additive per-block cost plus two interaction terms,
    a kernel-transition overhead and a wave-quantization step in total depth.
    """
    additive = 0.0
    for u in range(len(spec.units)):
        scale = unit_scale(spec, u, params)
        kernels = _block_values(spec, arch, u, KERNEL_FEATURE, 1.0)
        ratios = _block_values(spec, arch, u, EXPANSION_FEATURE, 1.0)
        for k, e in zip(kernels, ratios):
            additive += block_cost(params, scale, k, e)
    waves = math.ceil(total_depth(arch) / params.rho)
    return (
        additive
        + params.alpha * kernel_transitions(spec, arch)
        + params.gamma * waves
    )


def oracle_latency(
    spec: SupernetSpec,
    arch: ArchConfig,
    params: OracleParams,
    seed: int,
    runs: int = 150,
) -> List[float]:
    mean = oracle_mean(spec, arch, params)
    if params.sigma == 0:
        return [mean] * runs
    rng = np.random.default_rng(seed)
    noise = np.exp(params.sigma * rng.standard_normal(runs))
    return [float(mean * g) for g in noise]
