from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from services.archspace import SupernetSpec, make_bins, sample_balanced
from services.baseline_lut import build_lut, evaluate_lut, fit_bias
from services.common.seeds import derive_seed
from services.dataset import LatencyDataset, training_samples, with_scheme
from services.encoding import SCHEMES
from services.measurement import OracleBackend, OracleParams
from services.predictor import EvalReport, TrainConfig, evaluate, train

from .collect import CollectSettings, collect_samples
from .config import EsmConfig
from .loop import run_esm

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    overall_accuracy: float
    min_bin_accuracy: Optional[float]
    mse: float


def _row(name: str, report: EvalReport) -> ComparisonRow:
    errors = np.asarray([p - a for a, p, _ in report.pairs], dtype=float)
    return ComparisonRow(
        name=name,
        overall_accuracy=report.overall_accuracy,
        min_bin_accuracy=report.min_bin_accuracy,
        mse=float(np.mean(errors * errors)) if errors.size else 0.0,
    )


def measured_pair(
    spec: SupernetSpec,
    backend: OracleBackend,
    *,
    n_train: int,
    n_test: int,
    n_bins: int,
    seed: int,
    runs_per_arch: int = 150,
) -> Tuple[LatencyDataset, LatencyDataset]:
    """Balanced train and test sets measured once, without reference injection."""
    bins = make_bins(spec, n_bins)
    settings = CollectSettings(runs_per_arch=runs_per_arch)

    def measured(n: int, name: str) -> LatencyDataset:
        archs = sample_balanced(spec, n, bins, derive_seed(seed, name))
        result = collect_samples(
            backend, archs, (), seed=derive_seed(seed, "measure", name), prefix=name, settings=settings
        )
        return LatencyDataset(spec=spec, scheme="fcc", bins=bins, samples=result.samples)

    return measured(n_train, "train"), measured(n_test, "test")


def compare_encodings(
    spec: SupernetSpec,
    *,
    n_train: int = 8000,
    n_test: int = 4000,
    seed: int = 0,
    params: Optional[OracleParams] = None,
    schemes: Sequence[str] = SCHEMES,
    train_cfg: Optional[TrainConfig] = None,
    n_bins: int = 4,
    calibration_size: int = 500,
    runs_per_arch: int = 150,
) -> List[ComparisonRow]:
    """
    One MLP per encoding plus the raw and bias-corrected LUT, all scored
    on the same measured test set.
    """
    backend = OracleBackend(spec, params)
    train_ds, test_ds = measured_pair(
        spec, backend, n_train=n_train, n_test=n_test, n_bins=n_bins, seed=seed,
        runs_per_arch=runs_per_arch,
    )
    cfg = (train_cfg or TrainConfig()).model_copy(update={"seed": derive_seed(seed, "train")})
    rows: List[ComparisonRow] = []
    for scheme in schemes:
        model = train(with_scheme(train_ds, scheme), cfg)
        report = evaluate(model, with_scheme(test_ds, scheme), "overall", 0.0)
        rows.append(_row(scheme, report))
        LOGGER.info("%s: overall accuracy %.4f", scheme, report.overall_accuracy)

    lut = build_lut(spec, backend, derive_seed(seed, "lut"), runs_per_arch=runs_per_arch)
    rows.append(_row("lut", evaluate_lut(lut, test_ds, "overall", 0.0)))
    calibration = [(s.arch, s.latency_ms) for s in training_samples(train_ds)[:calibration_size]]
    bias = fit_bias(lut, calibration)
    rows.append(_row("lut+bias", evaluate_lut(lut, test_ds, "overall", 0.0, bias)))
    return rows


@dataclass(frozen=True)
class StrategyOutcome:
    seed: int
    strategy: str
    converged: bool
    iterations: int
    measured_samples: int


def compare_strategies(
    base: EsmConfig, seeds: Iterable[int], strategies: Sequence[str] = ("balanced", "random")
) -> List[StrategyOutcome]:
    """Run the ESM loop once per (seed, strategy) and record what convergence cost."""
    out: List[StrategyOutcome] = []
    for seed in seeds:
        for strategy in strategies:
            cfg = base.model_copy(update={"seed": seed, "strategy": strategy})
            _, history, _ = run_esm(cfg)
            out.append(
                StrategyOutcome(
                    seed=seed,
                    strategy=strategy,
                    converged=history.converged,
                    iterations=history.iterations,
                    measured_samples=history.measured_samples,
                )
            )
            LOGGER.info(
                "seed %d %s: %s after %d iteration(s), %d measurements",
                seed,
                strategy,
                history.status,
                history.iterations,
                history.measured_samples,
            )
    return out
