from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from services.archspace import ArchConfig


class BackendError(RuntimeError):
    def __init__(self, message: str, *, batch_id: Optional[str] = None) -> None:
        self.batch_id = batch_id
        prefix = f"batch {batch_id}: " if batch_id else ""
        super().__init__(prefix + message)


class BackendProtocolError(BackendError):
    pass


class BackendExitError(BackendError):
    pass


class BackendTimeoutError(BackendError):
    pass


class OracleParams(BaseModel):
    """Coefficients of the synthetic latency oracle (milliseconds)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    a1: float = Field(default=0.002, ge=0)
    a2: float = Field(default=0.05, ge=0)
    a3: float = Field(default=0.5, ge=0)
    alpha: float = Field(default=0.12, ge=0)
    gamma: float = Field(default=0.3, ge=0)
    rho: int = Field(default=4, ge=1)
    sigma: float = Field(default=0.01, ge=0)
    width_ref: float = Field(default=256.0, gt=0)


@dataclass(frozen=True)
class BackendDescriptor:
    backend_id: str
    kind: str
    deterministic: bool
    max_runs_per_arch: Optional[int] = None
    params: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class RawMeasurement:
    arch_id: str
    runs: Tuple[float, ...]
    backend_id: str
    batch_id: str


@dataclass(frozen=True)
class MeasuredArch:
    arch_id: str
    arch: ArchConfig
    latency_ms: float
    raw: RawMeasurement


@dataclass(frozen=True)
class BatchResult:
    batch_id: str
    backend_id: str
    measured: Tuple[MeasuredArch, ...]
    failed: Tuple[Tuple[str, str], ...] = ()

    def pairs(self) -> List[Tuple[ArchConfig, float]]:
        return [(m.arch, m.latency_ms) for m in self.measured]

    def failed_ids(self) -> List[str]:
        return [arch_id for arch_id, _ in self.failed]


class MeasurementBackend(Protocol):
    """
    Anything that turns architectures into per-inference latencies.

    measure() returns raw runs keyed by arch id; ids may be missing or carry
    invalid runs, which measure_batch reports as per-arch failures.
    """

    @property
    def descriptor(self) -> BackendDescriptor: ...

    def measure(
        self,
        requests: Sequence[Tuple[str, ArchConfig]],
        *,
        runs_per_arch: int,
        batch_id: str,
        seed: int,
    ) -> Dict[str, Sequence[float]]: ...
