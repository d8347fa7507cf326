from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from services.archspace import ArchConfig
from services.common.seeds import derive_seed
from services.dataset import Sample, reference_history
from services.measurement import (
    DEFAULT_QC_THRESHOLD,
    DEFAULT_RUNS_PER_ARCH,
    BackendError,
    MeasurementBackend,
    QcError,
    QcReport,
    failure_rate,
    inject_references,
    measure_batch,
    qc_check,
    reference_positions,
)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CollectSettings:
    batch_size: int = 100
    runs_per_arch: int = DEFAULT_RUNS_PER_ARCH
    qc_threshold: float = DEFAULT_QC_THRESHOLD
    qc_retries: int = 2
    failure_tolerance: float = 0.05


@dataclass(frozen=True)
class CollectResult:
    samples: Tuple[Sample, ...]
    batch_ids: Tuple[str, ...]
    qc: Optional[QcReport] = None
    remeasured: Tuple[str, ...] = ()
    failed: Tuple[Tuple[str, str], ...] = field(default_factory=tuple)
    # every reading requested from the backend, references and re-measured batches included
    measurements: int = 0

    @property
    def arch_samples(self) -> List[Sample]:
        return [s for s in self.samples if not s.is_reference]

    @property
    def reference_samples(self) -> List[Sample]:
        return [s for s in self.samples if s.is_reference]


def _measure_chunk(
    backend: MeasurementBackend,
    chunk: Sequence[ArchConfig],
    refs: Sequence[ArchConfig],
    batch_id: str,
    seed: int,
    settings: CollectSettings,
) -> Tuple[List[Sample], List[Tuple[str, str]]]:
    archs = inject_references(chunk, refs)
    ref_at = {pos: j for j, pos in enumerate(reference_positions(len(chunk), len(refs)))}
    ids = [f"{batch_id}-{i:05d}" for i in range(len(archs))]
    result = measure_batch(
        backend,
        archs,
        runs_per_arch=settings.runs_per_arch,
        seed=derive_seed(seed, batch_id),
        batch_id=batch_id,
        arch_ids=ids,
    )
    rate = failure_rate(result)
    if rate > settings.failure_tolerance:
        raise BackendError(
            f"{len(result.failed)} of {len(archs)} measurements failed "
            f"(tolerance {settings.failure_tolerance:.0%})",
            batch_id=batch_id,
        )
    position = {arch_id: i for i, arch_id in enumerate(ids)}
    samples: List[Sample] = []
    for m in result.measured:
        j = ref_at.get(position[m.arch_id])
        samples.append(
            Sample(
                sample_id=m.arch_id,
                arch=m.arch,
                latency_ms=m.latency_ms,
                batch_id=batch_id,
                is_reference=j is not None,
                ref_index=j,
            )
        )
    return samples, list(result.failed)


def collect_samples(
    backend: MeasurementBackend,
    archs: Sequence[ArchConfig],
    refs: Sequence[ArchConfig],
    *,
    seed: int,
    prefix: str,
    settings: Optional[CollectSettings] = None,
    ledger: Sequence[Sample] = (),
) -> CollectResult:
    """
    Measure archs in batches with the reference models injected into each,
    then QC the reference readings (earlier ledger readings first).

    Batches flagged by QC are measured again under a fresh batch id
    (<batch>-r1, -r2, ...) and replace the flagged readings. QcError is
    raised when a batch is still flagged after settings.qc_retries attempts.
    """
    settings = settings or CollectSettings()
    size = max(1, settings.batch_size)
    chunks: Dict[str, List[ArchConfig]] = {}
    for k, start in enumerate(range(0, len(archs), size)):
        chunks[f"{prefix}-b{k:04d}"] = list(archs[start : start + size])

    by_batch: Dict[str, List[Sample]] = {}
    failed: List[Tuple[str, str]] = []
    measurements = 0
    for batch_id, chunk in chunks.items():
        by_batch[batch_id], lost = _measure_chunk(backend, chunk, refs, batch_id, seed, settings)
        failed.extend(lost)
        measurements += len(by_batch[batch_id]) + len(lost)

    report: Optional[QcReport] = None
    remeasured: List[str] = []
    attempts: Dict[str, int] = {}
    origin = {bid: bid for bid in by_batch}
    witnesses: Dict[str, List[float]] = {}
    while refs:
        current = [s for samples in by_batch.values() for s in samples]
        history = reference_history([*ledger, *current])
        thin = [ref for ref, readings in history.items() if len(readings) < 2]
        if thin or len(history) < len(refs):
            LOGGER.warning(
                "QC skipped for %s: some references have fewer than 2 readings", prefix
            )
            break
        report = qc_check(history, settings.qc_threshold, witnesses)
        flagged = [bid for bid in report.outlier_batches if bid in by_batch]
        stale = [bid for bid in report.outlier_batches if bid not in by_batch]
        if stale:
            LOGGER.warning("QC flagged already accepted batches: %s", ", ".join(stale))
        if not flagged:
            break
        for bid in flagged:
            root = origin[bid]
            attempts[root] = attempts.get(root, 0) + 1
            if attempts[root] > settings.qc_retries:
                raise QcError(
                    f"batch {bid} still deviates after {settings.qc_retries} re-measurement(s)"
                )
            retry_id = f"{root}-r{attempts[root]}"
            LOGGER.info("re-measuring batch %s as %s", bid, retry_id)
            for s in by_batch.pop(bid):
                if s.is_reference:
                    witnesses.setdefault(f"ref-{s.ref_index}", []).append(s.latency_ms)
            by_batch[retry_id], lost = _measure_chunk(
                backend, chunks[root], refs, retry_id, seed, settings
            )
            origin[retry_id] = root
            failed.extend(lost)
            measurements += len(by_batch[retry_id]) + len(lost)
            remeasured.append(retry_id)

    samples = tuple(s for batch in by_batch.values() for s in batch)
    return CollectResult(
        samples=samples,
        batch_ids=tuple(by_batch),
        qc=report,
        remeasured=tuple(remeasured),
        failed=tuple(failed),
        measurements=measurements,
    )
