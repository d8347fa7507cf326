from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from services.archspace import ArchConfig, bin_index
from services.dataset import LatencyDataset, latencies, training_samples
from services.predictor import EvalReport, summarize

from .lut import LatencyLut, LutError, lut_predict

LOGGER = logging.getLogger(__name__)

DEFAULT_CALIBRATION_SIZE = 500


@dataclass(frozen=True)
class BiasCorrection:
    slope: float
    intercept: float
    n_points: int


def fit_bias(
    lut: LatencyLut, calibration: Sequence[Tuple[ArchConfig, float]]
) -> BiasCorrection:
    """Ordinary least squares of measured latency on the LUT estimate."""
    if len(calibration) < 2:
        raise LutError("bias correction needs at least 2 calibration points")
    x = np.asarray([lut_predict(lut, arch) for arch, _ in calibration], dtype=float)
    y = np.asarray([actual for _, actual in calibration], dtype=float)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx <= 1e-12 * max(1.0, float(x.mean()) ** 2) * len(x):
        raise LutError("calibration LUT estimates are constant; slope is undefined")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    LOGGER.info("bias correction: slope=%.6f intercept=%.6f ms (%d points)", slope, intercept, len(x))
    return BiasCorrection(slope=slope, intercept=intercept, n_points=len(x))


def corrected_predict(lut: LatencyLut, bias: BiasCorrection, arch: ArchConfig) -> float:
    return bias.slope * lut_predict(lut, arch) + bias.intercept


def evaluate_lut(
    lut: LatencyLut,
    test_set: LatencyDataset,
    strategy: str,
    acc_th: float,
    bias: Optional[BiasCorrection] = None,
) -> EvalReport:
    samples = training_samples(test_set)
    if bias is None:
        predicted = [lut_predict(lut, s.arch) for s in samples]
    else:
        predicted = [corrected_predict(lut, bias, s.arch) for s in samples]
    return summarize(
        list(latencies(samples)),
        predicted,
        [bin_index(s.arch, test_set.bins) for s in samples],
        test_set.bins.n_bins,
        strategy,
        acc_th,
    )
