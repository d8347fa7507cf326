from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

LOGGER = logging.getLogger(__name__)

DEFAULT_QC_THRESHOLD = 0.03
# Keeps an exact 3% deviation inside the band despite float rounding.
_BOUNDARY_SLACK = 1e-12


class QcError(RuntimeError):
    pass


@dataclass(frozen=True)
class RefReading:
    batch_id: str
    latency_ms: float


@dataclass(frozen=True)
class QcReport:
    threshold: float
    deviations: Dict[str, Tuple[Tuple[str, float], ...]]
    outlier_batches: Tuple[str, ...]
    passed: bool

    def max_deviation(self) -> float:
        values = [d for series in self.deviations.values() for _, d in series]
        return max(values, default=0.0)


def _agrees(value: float, other: float, threshold: float) -> bool:
    return abs(other - value) / value <= threshold + _BOUNDARY_SLACK


def _anchor(values: Sequence[float], witnesses: Sequence[float], threshold: float) -> int:
    # Most agreeing current readings, then most agreeing witnesses, then earliest.
    def key(i: int) -> Tuple[int, int, int]:
        v = values[i]
        current = sum(1 for j, w in enumerate(values) if j != i and _agrees(v, w, threshold))
        voted = sum(1 for w in witnesses if _agrees(v, w, threshold))
        return current, voted, -i

    return max(range(len(values)), key=key)


def qc_check(
    ref_history: Mapping[str, Sequence[RefReading]],
    threshold: float = DEFAULT_QC_THRESHOLD,
    witnesses: Optional[Mapping[str, Sequence[float]]] = None,
) -> QcReport:
    """
    Reference-model drift check.

    Each reading is compared with the running mean of the retained readings
    of the same reference. The mean is seeded with the anchor reading, the
    one most other readings agree with within the threshold, so an off first batch is flagged instead of skewing every
    later comparison. Readings off by more than the threshold mark their
    batch as an outlier and are left out of the running mean.

    witnesses: readings of replaced batches; they only break ties between
    anchor candidates.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if not ref_history:
        raise QcError("no reference history")
    witnesses = witnesses or {}

    deviations: Dict[str, Tuple[Tuple[str, float], ...]] = {}
    outliers: List[str] = []
    for ref_id, readings in ref_history.items():
        if len(readings) < 2:
            raise QcError(
                f"reference {ref_id} has {len(readings)} reading(s); need at least 2"
            )
        values = [r.latency_ms for r in readings]
        anchor = _anchor(values, witnesses.get(ref_id, ()), threshold)
        kept: List[float] = [values[anchor]]
        series: List[Tuple[str, float]] = []
        for i, reading in enumerate(readings):
            if i == anchor:
                series.append((reading.batch_id, 0.0))
                continue
            mean = math.fsum(kept) / len(kept)
            dev = abs(reading.latency_ms - mean) / mean
            series.append((reading.batch_id, dev))
            if dev > threshold + _BOUNDARY_SLACK:
                if reading.batch_id not in outliers:
                    outliers.append(reading.batch_id)
            else:
                kept.append(reading.latency_ms)
        deviations[ref_id] = tuple(series)

    report = QcReport(
        threshold=threshold,
        deviations=deviations,
        outlier_batches=tuple(outliers),
        passed=not outliers,
    )
    if outliers:
        LOGGER.warning(
            "QC flagged %d batch(es) above %.1f%%: %s",
            len(outliers),
            threshold * 100,
            ", ".join(outliers),
        )
    else:
        LOGGER.info("QC passed (max deviation %.3f%%)", report.max_deviation() * 100)
    return report
