from __future__ import annotations

from typing import Dict, Mapping, Optional, Sequence, Tuple

from services.archspace import ArchConfig, SupernetSpec
from services.common.seeds import derive_seed

from .oracle import oracle_latency
from .types import BackendDescriptor, OracleParams


class OracleBackend:
    """
    Synthetic stand-in for a target device.

    drift maps batch ids to a multiplicative factor applied to every run of
    that batch; it simulates thermal or clock drift for QC tests.
    """

    def __init__(
        self,
        spec: SupernetSpec,
        params: Optional[OracleParams] = None,
        *,
        drift: Optional[Mapping[str, float]] = None,
        backend_id: str = "oracle",
    ) -> None:
        self._spec = spec
        self._params = params or OracleParams()
        self._drift: Dict[str, float] = dict(drift or {})
        self._backend_id = backend_id

    @property
    def params(self) -> OracleParams:
        return self._params

    @property
    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(
            backend_id=self._backend_id,
            kind="oracle",
            deterministic=True,
            params=self._params.model_dump(),
        )

    def measure(
        self,
        requests: Sequence[Tuple[str, ArchConfig]],
        *,
        runs_per_arch: int,
        batch_id: str,
        seed: int,
    ) -> Dict[str, Sequence[float]]:
        factor = self._drift.get(batch_id, 1.0)
        out: Dict[str, Sequence[float]] = {}
        for position, (arch_id, arch) in enumerate(requests):
            runs = oracle_latency(
                self._spec,
                arch,
                self._params,
                derive_seed(seed, batch_id, position),
                runs=runs_per_arch,
            )
            out[arch_id] = [r * factor for r in runs] if factor != 1.0 else runs
        return out
