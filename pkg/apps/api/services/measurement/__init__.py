from .aggregate import MIN_RUNS, AggregationError, aggregate_latency
from .backends import OracleBackend
from .batch import (
    DEFAULT_RUNS_PER_ARCH,
    failure_rate,
    inject_references,
    measure_batch,
    reference_positions,
)
from .external import ExternalBackend, external_backend_exchange
from .oracle import kernel_transitions, oracle_latency, oracle_mean
from .qc import DEFAULT_QC_THRESHOLD, QcError, QcReport, RefReading, qc_check
from .types import (
    BackendDescriptor,
    BackendError,
    BackendExitError,
    BackendProtocolError,
    BackendTimeoutError,
    BatchResult,
    MeasuredArch,
    MeasurementBackend,
    OracleParams,
    RawMeasurement,
)

__all__ = [
    "AggregationError",
    "BackendDescriptor",
    "BackendError",
    "BackendExitError",
    "BackendProtocolError",
    "BackendTimeoutError",
    "BatchResult",
    "DEFAULT_QC_THRESHOLD",
    "DEFAULT_RUNS_PER_ARCH",
    "ExternalBackend",
    "MIN_RUNS",
    "MeasuredArch",
    "MeasurementBackend",
    "OracleBackend",
    "OracleParams",
    "QcError",
    "QcReport",
    "RawMeasurement",
    "RefReading",
    "aggregate_latency",
    "external_backend_exchange",
    "failure_rate",
    "inject_references",
    "kernel_transitions",
    "measure_batch",
    "oracle_latency",
    "oracle_mean",
    "qc_check",
    "reference_positions",
]
