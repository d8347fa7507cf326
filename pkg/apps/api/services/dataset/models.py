from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from services.archspace import ArchConfig, DepthBins, SupernetSpec
from services.encoding import SchemeKind, encode, encode_many, encoding_length
from services.measurement import RefReading


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    sample_id: str
    arch: ArchConfig
    latency_ms: float
    batch_id: str
    is_reference: bool = False
    ref_index: Optional[int] = None
    encoded: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if not self.latency_ms > 0:
            raise DatasetError(f"{self.sample_id}: latency must be > 0")
        if self.is_reference and self.ref_index is None:
            raise DatasetError(f"{self.sample_id}: reference sample needs ref_index")


@dataclass(frozen=True)
class LatencyDataset:
    """
    Architecture-latency pairs of one spec under one encoding scheme.

    Reference samples are the drift ledger: they stay in the dataset but
    never reach a train or test split. Instances are never mutated;
    with_samples() returns the next version.
    """

    spec: SupernetSpec
    scheme: SchemeKind
    bins: DepthBins
    samples: Tuple[Sample, ...] = ()
    refs: Tuple[ArchConfig, ...] = ()
    version: int = 1
    seeds: Dict[str, int] = field(default_factory=dict)
    backend: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        width = encoding_length(self.spec, self.scheme)
        for s in self.samples:
            if s.arch.spec_name != self.spec.name:
                raise DatasetError(
                    f"{s.sample_id}: spec '{s.arch.spec_name}' != '{self.spec.name}'"
                )
            if s.encoded is not None and len(s.encoded) != width:
                raise DatasetError(f"{s.sample_id}: encoded length != {width}")

    @property
    def spec_name(self) -> str:
        return self.spec.name

    def __len__(self) -> int:
        return len(self.samples)


def training_samples(ds: LatencyDataset) -> List[Sample]:
    return [s for s in ds.samples if not s.is_reference]


def reference_samples(ds: LatencyDataset) -> List[Sample]:
    return [s for s in ds.samples if s.is_reference]


def reference_history(
    samples: Sequence[Sample],
) -> Dict[str, List[RefReading]]:
    out: Dict[str, List[RefReading]] = {}
    for s in samples:
        if s.is_reference:
            out.setdefault(f"ref-{s.ref_index}", []).append(
                RefReading(batch_id=s.batch_id, latency_ms=s.latency_ms)
            )
    return out


def with_samples(ds: LatencyDataset, new: Sequence[Sample]) -> LatencyDataset:
    known = {s.sample_id for s in ds.samples}
    clash = [s.sample_id for s in new if s.sample_id in known]
    if clash:
        raise DatasetError(f"duplicate sample ids: {', '.join(clash[:5])}")
    return replace(ds, samples=ds.samples + tuple(new), version=ds.version + 1)


def with_encodings(ds: LatencyDataset) -> LatencyDataset:
    samples = tuple(
        s
        if s.encoded is not None
        else replace(s, encoded=encode(ds.spec, s.arch, ds.scheme).values)
        for s in ds.samples
    )
    return replace(ds, samples=samples)


def encoded_matrix(ds: LatencyDataset, samples: Sequence[Sample]) -> np.ndarray:
    if all(s.encoded is not None for s in samples) and samples:
        return np.asarray([s.encoded for s in samples], dtype=float)
    return encode_many(ds.spec, [s.arch for s in samples], ds.scheme)


def latencies(samples: Sequence[Sample]) -> np.ndarray:
    return np.asarray([s.latency_ms for s in samples], dtype=float)


def with_scheme(ds: LatencyDataset, scheme: SchemeKind) -> LatencyDataset:
    """Same samples under another encoding; cached encodings are dropped."""
    if scheme == ds.scheme:
        return ds
    return replace(
        ds,
        scheme=scheme,
        samples=tuple(replace(s, encoded=None) for s in ds.samples),
    )
