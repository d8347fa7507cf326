from .bins import BinsError, bin_index, bin_range, bin_totals, make_bins, total_bin_index
from .counting import (
    composition_counts,
    format_size,
    max_total_depth,
    min_total_depth,
    space_size,
)
from .models import (
    ArchConfig,
    DepthBins,
    FeatureDim,
    SpecError,
    SupernetSpec,
    UnitSpec,
    arch_from_dict,
    arch_to_dict,
    total_depth,
    validate_arch,
)
from .presets import PRESETS, load_spec, spec_from_mapping, spec_to_mapping
from .sampling import (
    depth_histogram,
    per_bin_counts,
    sample_allocation,
    sample_balanced,
    sample_random,
)

__all__ = [
    "ArchConfig",
    "BinsError",
    "DepthBins",
    "FeatureDim",
    "PRESETS",
    "SpecError",
    "SupernetSpec",
    "UnitSpec",
    "arch_from_dict",
    "arch_to_dict",
    "bin_index",
    "bin_range",
    "bin_totals",
    "composition_counts",
    "depth_histogram",
    "format_size",
    "load_spec",
    "make_bins",
    "max_total_depth",
    "min_total_depth",
    "per_bin_counts",
    "sample_allocation",
    "sample_balanced",
    "sample_random",
    "space_size",
    "spec_from_mapping",
    "spec_to_mapping",
    "total_bin_index",
    "total_depth",
    "validate_arch",
]
