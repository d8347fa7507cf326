from __future__ import annotations

from decimal import Decimal
from functools import lru_cache
from typing import Tuple

from .models import SupernetSpec


def min_total_depth(spec: SupernetSpec) -> int:
    return sum(unit.min_depth for unit in spec.units)


def max_total_depth(spec: SupernetSpec) -> int:
    return sum(unit.max_depth for unit in spec.units)


def space_size(spec: SupernetSpec) -> int:
    """
    Exact number of distinct architectures.

    Each unit independently picks a depth d, then one per-block combination
    for each of its d blocks, then one per-unit combination.
    """
    per_block = spec.block_combinations
    per_unit = spec.unit_combinations
    total = 1
    for unit in spec.units:
        total *= sum(per_block**d for d in unit.depth_options) * per_unit
    return total


def format_size(n: int) -> str:
    mantissa, exponent = f"{Decimal(n):.2E}".split("E")
    return f"{mantissa}e{int(exponent)}"


@lru_cache(maxsize=32)
def composition_counts(spec: SupernetSpec) -> Tuple[Tuple[int, ...], ...]:
    """
    ways[u][t] = number of unit-depth tuples for units u.. summing to t.

    Indexed up to the maximum total depth; ways[len(units)] is the empty
    suffix (1 way to reach 0).
    """
    top = max_total_depth(spec)
    n_units = len(spec.units)
    ways = [[0] * (top + 1) for _ in range(n_units + 1)]
    ways[n_units][0] = 1
    for u in range(n_units - 1, -1, -1):
        nxt = ways[u + 1]
        cur = ways[u]
        for d in spec.units[u].depth_options:
            for t in range(d, top + 1):
                cur[t] += nxt[t - d]
    return tuple(tuple(row) for row in ways)


def attainable_totals(spec: SupernetSpec) -> Tuple[int, ...]:
    ways = composition_counts(spec)[0]
    return tuple(t for t, n in enumerate(ways) if n > 0)
