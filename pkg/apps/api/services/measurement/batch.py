from __future__ import annotations

import logging
import math
import threading
from typing import Dict, List, Optional, Sequence, Tuple

from services.archspace import ArchConfig

from .aggregate import MIN_RUNS, aggregate_latency
from .types import (
    BatchResult,
    MeasuredArch,
    MeasurementBackend,
    RawMeasurement,
)

LOGGER = logging.getLogger(__name__)

DEFAULT_RUNS_PER_ARCH = 150

_LOCKS_GUARD = threading.Lock()
_LOCKS: Dict[str, threading.Lock] = {}


def _backend_lock(backend_id: str) -> threading.Lock:
    with _LOCKS_GUARD:
        return _LOCKS.setdefault(backend_id, threading.Lock())


def reference_positions(n_batch: int, n_refs: int) -> List[int]:
    # Reference j goes after floor((j+1) * n / (r+1)) batch items.
    return [((j + 1) * n_batch) // (n_refs + 1) + j for j in range(n_refs)]


def inject_references(
    batch: Sequence[ArchConfig], refs: Sequence[ArchConfig]
) -> List[ArchConfig]:
    """Interleave every reference once, evenly spread through the batch."""
    if not refs:
        return list(batch)
    positions = reference_positions(len(batch), len(refs))
    out: List[ArchConfig] = []
    items = iter(batch)
    ref_iter = iter(refs)
    for i in range(len(batch) + len(refs)):
        out.append(next(ref_iter) if i in positions else next(items))
    return out


def _validate_runs(runs: Optional[Sequence[float]], expected: int) -> Optional[str]:
    if runs is None:
        return "no runs returned"
    if len(runs) != expected:
        return f"expected {expected} runs, got {len(runs)}"
    for r in runs:
        if not isinstance(r, (int, float)) or not math.isfinite(r):
            return "non-finite latency"
        if r <= 0:
            return "non-positive latency"
    return None


def measure_batch(
    backend: MeasurementBackend,
    archs: Sequence[ArchConfig],
    runs_per_arch: int = DEFAULT_RUNS_PER_ARCH,
    seed: int = 0,
    *,
    batch_id: str = "batch-0000",
    arch_ids: Optional[Sequence[str]] = None,
) -> BatchResult:
    """
    Measure a batch strictly sequentially on one backend.

    A per-backend lock keeps one measurement in flight at a time; invalid
    per-arch results are excluded and reported in BatchResult.failed.
    """
    if runs_per_arch < MIN_RUNS:
        raise ValueError(f"runs_per_arch must be >= {MIN_RUNS}")
    ids = list(arch_ids) if arch_ids is not None else [
        f"{batch_id}-{i:05d}" for i in range(len(archs))
    ]
    if len(ids) != len(archs) or len(set(ids)) != len(ids):
        raise ValueError("arch_ids must be unique and match archs")

    descriptor = backend.descriptor
    requests = list(zip(ids, archs))
    with _backend_lock(descriptor.backend_id):
        raw = backend.measure(
            requests, runs_per_arch=runs_per_arch, batch_id=batch_id, seed=seed
        )

    measured: List[MeasuredArch] = []
    failed: List[Tuple[str, str]] = []
    for arch_id, arch in requests:
        runs = raw.get(arch_id)
        problem = _validate_runs(runs, runs_per_arch)
        if problem is not None:
            LOGGER.warning("batch %s: %s failed: %s", batch_id, arch_id, problem)
            failed.append((arch_id, problem))
            continue
        values = tuple(float(r) for r in runs or ())
        measured.append(
            MeasuredArch(
                arch_id=arch_id,
                arch=arch,
                latency_ms=aggregate_latency(values),
                raw=RawMeasurement(
                    arch_id=arch_id,
                    runs=values,
                    backend_id=descriptor.backend_id,
                    batch_id=batch_id,
                ),
            )
        )
    LOGGER.info(
        "batch %s: measured %d archs on %s (%d failed)",
        batch_id,
        len(measured),
        descriptor.backend_id,
        len(failed),
    )
    return BatchResult(
        batch_id=batch_id,
        backend_id=descriptor.backend_id,
        measured=tuple(measured),
        failed=tuple(failed),
    )


def failure_rate(result: BatchResult) -> float:
    total = len(result.measured) + len(result.failed)
    return len(result.failed) / total if total else 0.0
