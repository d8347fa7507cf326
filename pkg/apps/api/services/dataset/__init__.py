from .models import (
    DatasetError,
    LatencyDataset,
    Sample,
    encoded_matrix,
    latencies,
    reference_history,
    reference_samples,
    training_samples,
    with_encodings,
    with_samples,
    with_scheme,
)
from .persistence import (
    FORMAT_VERSION,
    DatasetChecksumError,
    DatasetSchemaError,
    DatasetVersionError,
    dump_records,
    load_dataset,
    read_records,
    save_dataset,
)
from .splits import partition_by_bin, split

__all__ = [
    "DatasetChecksumError",
    "DatasetError",
    "DatasetSchemaError",
    "DatasetVersionError",
    "FORMAT_VERSION",
    "LatencyDataset",
    "Sample",
    "dump_records",
    "encoded_matrix",
    "latencies",
    "load_dataset",
    "partition_by_bin",
    "read_records",
    "reference_history",
    "reference_samples",
    "save_dataset",
    "split",
    "training_samples",
    "with_encodings",
    "with_samples",
    "with_scheme",
]
