from .allocation import Allocation, allocate_extension
from .collect import CollectResult, CollectSettings, collect_samples
from .config import (
    BackendConfig,
    EsmConfig,
    EsmConfigError,
    EsmError,
    config_from_mapping,
    env_overrides,
    load_config,
)
from .experiments import (
    ComparisonRow,
    StrategyOutcome,
    compare_encodings,
    compare_strategies,
    measured_pair,
)
from .extension import collect_extension, extend_dataset
from .history import (
    EsmHistory,
    IterationRecord,
    history_to_dict,
    read_scatter_rows,
    write_history,
    write_history_scatter,
    write_scatter_rows,
)
from .loop import backend_from_config, measure_test_set, run_esm, run_seeds

__all__ = [
    "Allocation",
    "BackendConfig",
    "CollectResult",
    "CollectSettings",
    "ComparisonRow",
    "EsmConfig",
    "EsmConfigError",
    "EsmError",
    "EsmHistory",
    "IterationRecord",
    "StrategyOutcome",
    "allocate_extension",
    "backend_from_config",
    "collect_samples",
    "compare_encodings",
    "compare_strategies",
    "config_from_mapping",
    "env_overrides",
    "collect_extension",
    "extend_dataset",
    "history_to_dict",
    "load_config",
    "measure_test_set",
    "measured_pair",
    "read_scatter_rows",
    "run_esm",
    "run_seeds",
    "write_history",
    "write_history_scatter",
    "write_scatter_rows",
]
