from __future__ import annotations

from bisect import bisect_right
from typing import List

from .counting import attainable_totals, max_total_depth, min_total_depth
from .models import ArchConfig, DepthBins, SupernetSpec, total_depth


class BinsError(ValueError):
    pass


def make_bins(spec: SupernetSpec, n_bins: int) -> DepthBins:
    """
    Equally spaced depth bins over [min_total, max_total].

    Bins are half-open [edge_i, edge_i+1) except the last, which includes the
    maximum; the last bin absorbs the rounding remainder. With one bin per
    total the final edge repeats, since the last bin is the single total [hi, hi].
    """
    lo = min_total_depth(spec)
    hi = max_total_depth(spec)
    distinct = hi - lo + 1
    if n_bins < 1:
        raise BinsError("n_bins must be >= 1")
    if n_bins > distinct:
        raise BinsError(
            f"n_bins={n_bins} exceeds the {distinct} distinct total depths of '{spec.name}'"
        )
    edges = [lo + (i * distinct) // n_bins for i in range(n_bins)]
    edges.append(hi)
    return DepthBins(n_bins=n_bins, edges=tuple(edges))


def total_bin_index(total: int, bins: DepthBins) -> int:
    lo, hi = bins.edges[0], bins.edges[-1]
    if not lo <= total <= hi:
        raise BinsError(f"total depth {total} outside bins [{lo}, {hi}]")
    if total == hi:
        return bins.n_bins - 1
    return bisect_right(bins.edges, total) - 1


def bin_index(arch: ArchConfig, bins: DepthBins) -> int:
    return total_bin_index(total_depth(arch), bins)


def bin_range(bins: DepthBins, i: int) -> range:
    lo = bins.edges[i]
    hi = bins.edges[i + 1]
    if i == bins.n_bins - 1:
        return range(lo, hi + 1)
    return range(lo, hi)


def bin_totals(spec: SupernetSpec, bins: DepthBins, i: int) -> List[int]:
    reachable = set(attainable_totals(spec))
    return [t for t in bin_range(bins, i) if t in reachable]


def bins_match_spec(spec: SupernetSpec, bins: DepthBins) -> bool:
    return (
        bins.edges[0] == min_total_depth(spec)
        and bins.edges[-1] == max_total_depth(spec)
    )
