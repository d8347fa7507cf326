from .bias import (
    DEFAULT_CALIBRATION_SIZE,
    BiasCorrection,
    corrected_predict,
    evaluate_lut,
    fit_bias,
)
from .lut import LatencyLut, LutError, build_lut, lut_predict, minimum_arch
from .persistence import load_lut, save_lut

__all__ = [
    "BiasCorrection",
    "DEFAULT_CALIBRATION_SIZE",
    "LatencyLut",
    "LutError",
    "build_lut",
    "corrected_predict",
    "evaluate_lut",
    "fit_bias",
    "load_lut",
    "lut_predict",
    "minimum_arch",
    "save_lut",
]
