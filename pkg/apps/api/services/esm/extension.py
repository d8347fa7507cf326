from __future__ import annotations

import logging
from typing import Optional, Sequence

from services.archspace import sample_allocation, sample_random
from services.common.seeds import derive_seed
from services.dataset import LatencyDataset, Sample, reference_samples, with_samples
from services.measurement import MeasurementBackend

from .allocation import Allocation
from .collect import CollectResult, CollectSettings, collect_samples

LOGGER = logging.getLogger(__name__)


def collect_extension(
    ds: LatencyDataset,
    allocation: Allocation,
    backend: MeasurementBackend,
    seed: int,
    *,
    iteration: int,
    settings: Optional[CollectSettings] = None,
    ledger: Sequence[Sample] = (),
) -> CollectResult:
    """Sample and measure one extension step without touching ds."""
    if allocation.per_bin and len(allocation.per_bin) != ds.bins.n_bins:
        raise ValueError("allocation must hold one count per bin")
    sample_seed = derive_seed(seed, "extend", iteration)
    archs = []
    if allocation.n_random:
        archs.extend(sample_random(ds.spec, allocation.n_random, sample_seed))
    if any(allocation.per_bin):
        archs.extend(sample_allocation(ds.spec, ds.bins, allocation.per_bin, sample_seed))
    if not archs:
        return CollectResult(samples=(), batch_ids=())

    result = collect_samples(
        backend,
        archs,
        ds.refs,
        seed=derive_seed(seed, "measure", iteration),
        prefix=f"it{iteration:02d}",
        settings=settings,
        ledger=[*ledger, *reference_samples(ds)],
    )
    LOGGER.info(
        "iteration %d: appended %d samples (%d reference readings, %d measurements)",
        iteration,
        len(result.arch_samples),
        len(result.reference_samples),
        result.measurements,
    )
    return result


def extend_dataset(
    ds: LatencyDataset,
    allocation: Allocation,
    backend: MeasurementBackend,
    seed: int,
    *,
    iteration: int,
    settings: Optional[CollectSettings] = None,
    ledger: Sequence[Sample] = (),
) -> LatencyDataset:
    """Sample, measure and append one extension step; returns the next version."""
    result = collect_extension(
        ds, allocation, backend, seed, iteration=iteration, settings=settings, ledger=ledger
    )
    return with_samples(ds, result.samples)
