from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Dict, List, Tuple

import numpy as np

from services.archspace import bin_index

from .models import LatencyDataset, Sample, training_samples

LOGGER = logging.getLogger(__name__)


def partition_by_bin(ds: LatencyDataset) -> Dict[int, List[Sample]]:
    out: Dict[int, List[Sample]] = {}
    for s in training_samples(ds):
        out.setdefault(bin_index(s.arch, ds.bins), []).append(s)
    return dict(sorted(out.items()))


def _test_quota(sizes: Dict[int, int], test_fraction: float) -> Dict[int, int]:
    # Largest remainder: every bin within one sample of its share, and the
    # total matches round(N * fraction).
    total = sum(sizes.values())
    target = int(round(total * test_fraction))
    raw = {b: n * test_fraction for b, n in sizes.items()}
    quota = {b: math.floor(v) for b, v in raw.items()}
    left = target - sum(quota.values())
    order = sorted(raw, key=lambda b: (-(raw[b] - quota[b]), b))
    for b in order[: max(left, 0)]:
        if quota[b] < sizes[b]:
            quota[b] += 1
    return quota


def split(
    ds: LatencyDataset, test_fraction: float, seed: int
) -> Tuple[LatencyDataset, LatencyDataset]:
    """Bin-stratified train/test partition of the non-reference samples."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    groups = partition_by_bin(ds)
    for b in range(ds.bins.n_bins):
        if b not in groups:
            LOGGER.warning("bin %d is empty; it contributes nothing to the split", b)

    quota = _test_quota({b: len(m) for b, m in groups.items()}, test_fraction)
    rng = np.random.default_rng(seed)
    train: List[Sample] = []
    test: List[Sample] = []
    for b, members in groups.items():
        order = rng.permutation(len(members))
        chosen = set(int(i) for i in order[: quota[b]])
        for i, s in enumerate(members):
            (test if i in chosen else train).append(s)
    return (
        replace(ds, samples=tuple(train)),
        replace(ds, samples=tuple(test)),
    )
