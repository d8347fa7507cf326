from __future__ import annotations

import math
from typing import Sequence

MIN_RUNS = 5
TRIM_FRACTION = 0.2


class AggregationError(ValueError):
    pass


def aggregate_latency(runs: Sequence[float]) -> float:
    """
    Trimmed mean: drop floor(0.2 n) fastest and slowest runs, average the
    rest. n=150 keeps the middle 90.
    """
    n = len(runs)
    if n < MIN_RUNS:
        raise AggregationError(f"need at least {MIN_RUNS} runs, got {n}")
    ordered = sorted(float(r) for r in runs)
    cut = math.floor(TRIM_FRACTION * n)
    kept = ordered[cut : n - cut]
    return math.fsum(kept) / len(kept)
