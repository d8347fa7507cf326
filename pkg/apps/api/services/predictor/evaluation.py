from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

from services.archspace import bin_index
from services.dataset import LatencyDataset, encoded_matrix, latencies, training_samples

from .mlp import MlpModel, PredictorError, predict_many

LOGGER = logging.getLogger(__name__)

Strategy = Literal["overall", "bin_wise"]
STRATEGIES: Tuple[str, ...] = ("overall", "bin_wise")

# Pass checks are inclusive; the slack absorbs float noise at the boundary.
_THRESHOLD_SLACK = 1e-12


def sample_accuracy(predicted: float, actual: float) -> float:
    if not actual > 0:
        raise ValueError(f"actual latency must be > 0, got {actual}")
    return max(0.0, 1.0 - abs(predicted - actual) / actual)


@dataclass(frozen=True)
class EvalReport:
    strategy: Strategy
    acc_th: float
    overall_accuracy: float
    per_bin_accuracy: Tuple[Optional[float], ...]
    bin_sizes: Tuple[int, ...]
    passed: bool
    pairs: Tuple[Tuple[float, float, int], ...] = ()

    @property
    def empty_bins(self) -> Tuple[int, ...]:
        return tuple(i for i, n in enumerate(self.bin_sizes) if n == 0)

    @property
    def min_bin_accuracy(self) -> Optional[float]:
        present = [a for a in self.per_bin_accuracy if a is not None]
        return min(present) if present else None


def summarize(
    actual: Sequence[float],
    predicted: Sequence[float],
    bin_ids: Sequence[int],
    n_bins: int,
    strategy: str,
    acc_th: float,
) -> EvalReport:
    """Build an EvalReport from aligned (actual, predicted, bin) columns."""
    if strategy not in STRATEGIES:
        raise PredictorError(f"unknown strategy '{strategy}' (expected one of {STRATEGIES})")
    if not 0 <= acc_th <= 1:
        raise PredictorError("acc_th must be in [0, 1]")
    if not actual:
        raise PredictorError("test set is empty")

    per_bin: List[List[float]] = [[] for _ in range(n_bins)]
    every: List[float] = []
    for a, p, b in zip(actual, predicted, bin_ids):
        acc = sample_accuracy(p, a)
        per_bin[b].append(acc)
        every.append(acc)

    per_bin_acc = tuple(math.fsum(v) / len(v) if v else None for v in per_bin)
    overall = math.fsum(every) / len(every)
    for i, v in enumerate(per_bin):
        if not v:
            LOGGER.warning("test set has no samples in bin %d", i)

    if strategy == "overall":
        passed = overall >= acc_th - _THRESHOLD_SLACK
    else:
        present = [a for a in per_bin_acc if a is not None]
        passed = min(present) >= acc_th - _THRESHOLD_SLACK

    return EvalReport(
        strategy=strategy,  # type: ignore[arg-type]
        acc_th=acc_th,
        overall_accuracy=overall,
        per_bin_accuracy=per_bin_acc,
        bin_sizes=tuple(len(v) for v in per_bin),
        passed=passed,
        pairs=tuple(
            (float(a), float(p), int(b)) for a, p, b in zip(actual, predicted, bin_ids)
        ),
    )


def evaluate(
    model: MlpModel, test_set: LatencyDataset, strategy: str, acc_th: float
) -> EvalReport:
    if model.spec_name and model.spec_name != test_set.spec_name:
        raise PredictorError(
            f"model was trained on '{model.spec_name}', test set is '{test_set.spec_name}'"
        )
    if model.scheme and model.scheme != test_set.scheme:
        raise PredictorError(
            f"model expects '{model.scheme}' encoding, test set is '{test_set.scheme}'"
        )
    samples = training_samples(test_set)
    if not samples:
        raise PredictorError("test set is empty")
    predicted = predict_many(model, encoded_matrix(test_set, samples))
    return summarize(
        list(latencies(samples)),
        list(predicted),
        [bin_index(s.arch, test_set.bins) for s in samples],
        test_set.bins.n_bins,
        strategy,
        acc_th,
    )
