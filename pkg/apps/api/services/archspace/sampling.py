from __future__ import annotations

import logging
from collections import Counter
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .bins import BinsError, bin_totals
from .counting import composition_counts
from .models import ArchConfig, DepthBins, FeatureDim, SupernetSpec, total_depth

LOGGER = logging.getLogger(__name__)


def _draw_below(rng: np.random.Generator, n: int) -> int:
    if n < 2**62:
        return int(rng.integers(0, n))
    return min(int(rng.random() * n), n - 1)


def _draw_indices(
    rng: np.random.Generator, dims: Sequence[FeatureDim]
) -> Tuple[int, ...]:
    return tuple(int(rng.integers(0, len(d.options))) for d in dims)


def _fill_features(
    spec: SupernetSpec, depths: Sequence[int], rng: np.random.Generator
) -> ArchConfig:
    block_dims = spec.block_dims
    unit_dims = spec.unit_dims
    blocks = tuple(
        tuple(_draw_indices(rng, block_dims) for _ in range(depth)) for depth in depths
    )
    units = tuple(_draw_indices(rng, unit_dims) for _ in depths)
    return ArchConfig(
        spec_name=spec.name,
        unit_depths=tuple(int(d) for d in depths),
        block_features=blocks,
        unit_features=units,
    )


def sample_random(spec: SupernetSpec, n: int, seed: int) -> List[ArchConfig]:
    """Uniform, independent draws of every unit depth and every feature."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    out: List[ArchConfig] = []
    for _ in range(n):
        depths = [
            unit.depth_options[int(rng.integers(0, len(unit.depth_options)))]
            for unit in spec.units
        ]
        out.append(_fill_features(spec, depths, rng))
    return out


def _sample_composition(
    spec: SupernetSpec, total: int, rng: np.random.Generator
) -> List[int]:
    # Walk the units, choosing each depth with probability proportional to
    # the number of completions of the remaining total.
    ways = composition_counts(spec)
    depths: List[int] = []
    remaining = total
    for u, unit in enumerate(spec.units):
        pick = _draw_below(rng, ways[u][remaining])
        for d in unit.depth_options:
            if d > remaining:
                break
            n = ways[u + 1][remaining - d]
            if pick < n:
                depths.append(d)
                remaining -= d
                break
            pick -= n
    return depths


def per_bin_counts(n: int, n_bins: int) -> List[int]:
    base, extra = divmod(n, n_bins)
    return [base + (1 if i < extra else 0) for i in range(n_bins)]


def sample_in_bin(
    spec: SupernetSpec,
    bins: DepthBins,
    bin_idx: int,
    n: int,
    rng: np.random.Generator,
) -> List[ArchConfig]:
    totals = bin_totals(spec, bins, bin_idx)
    if not totals:
        raise BinsError(f"bin {bin_idx} contains no attainable total depth")
    out: List[ArchConfig] = []
    for _ in range(n):
        total = totals[int(rng.integers(0, len(totals)))]
        out.append(_fill_features(spec, _sample_composition(spec, total, rng), rng))
    return out


def sample_balanced(
    spec: SupernetSpec, n: int, bins: DepthBins, seed: int
) -> List[ArchConfig]:
    """
    Equal allocation per depth bin (remainder to the lowest bins).

    Within a bin the total depth is uniform over attainable totals and the
    unit-depth composition is uniform over all compositions of that total.
    """
    if n < bins.n_bins:
        raise ValueError(f"n={n} must be >= n_bins={bins.n_bins}")
    return sample_allocation(spec, bins, per_bin_counts(n, bins.n_bins), seed)


def sample_allocation(
    spec: SupernetSpec, bins: DepthBins, counts: Sequence[int], seed: int
) -> List[ArchConfig]:
    if len(counts) != bins.n_bins:
        raise ValueError("one count per bin is required")
    rng = np.random.default_rng(seed)
    out: List[ArchConfig] = []
    for i, count in enumerate(counts):
        if count > 0:
            out.extend(sample_in_bin(spec, bins, i, count, rng))
    LOGGER.debug("sampled %d architectures over %d bins", len(out), bins.n_bins)
    return out


def depth_histogram(archs: Iterable[ArchConfig]) -> Dict[int, int]:
    return dict(sorted(Counter(total_depth(a) for a in archs).items()))
