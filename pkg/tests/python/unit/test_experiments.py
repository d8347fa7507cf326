from __future__ import annotations

import os
import unittest
from typing import Dict, List
from unittest.mock import patch

import numpy as np

from services.archspace import load_spec
from services.common.config import env_bool
from services.esm import (
    StrategyOutcome,
    compare_encodings,
    compare_strategies,
    config_from_mapping,
)
from services.measurement import OracleParams
from services.predictor import TrainConfig

SLOW = env_bool("ESM_RUN_SLOW")


class TestCompareEncodingsSmall(unittest.TestCase):
    def test_rows_for_every_model(self) -> None:
        rows = compare_encodings(
            load_spec("resnet"),
            n_train=80,
            n_test=40,
            seed=0,
            params=OracleParams(sigma=0.0),
            schemes=("fcc", "statistical"),
            train_cfg=TrainConfig(epochs=3, hidden_width=8),
            calibration_size=40,
            runs_per_arch=5,
        )
        self.assertEqual([r.name for r in rows], ["fcc", "statistical", "lut", "lut+bias"])
        for row in rows:
            self.assertGreaterEqual(row.overall_accuracy, 0.0)
            self.assertLessEqual(row.overall_accuracy, 1.0)
            self.assertGreaterEqual(row.mse, 0.0)


@unittest.skipUnless(SLOW, "set ESM_RUN_SLOW=1 to run the full comparisons")
class TestEncodingOrdering(unittest.TestCase):
    def test_median_ordering_over_ten_seeds(self) -> None:
        spec = load_spec("resnet")
        accuracy: Dict[str, List[float]] = {}
        for seed in range(10):
            rows = compare_encodings(spec, seed=seed, schemes=("fcc", "statistical"))
            for row in rows:
                accuracy.setdefault(row.name, []).append(row.overall_accuracy)
        median = {name: float(np.median(values)) for name, values in accuracy.items()}
        self.assertGreater(median["fcc"], median["lut+bias"])
        self.assertGreater(median["lut+bias"], median["lut"])
        self.assertGreaterEqual(median["fcc"] - median["statistical"], 0.02)


@unittest.skipUnless(SLOW, "set ESM_RUN_SLOW=1 to run the full comparisons")
@patch.dict(os.environ, {"ESM_BACKEND_COMMAND": "", "ESM_BACKEND_TIMEOUT_SECONDS": ""})
class TestStrategyComparison(unittest.TestCase):
    def test_balanced_converges_with_fewer_measurements_in_most_seeds(self) -> None:
        base = config_from_mapping(
            {"n_initial": 300, "n_step": 100, "acc_th": 0.9, "n_bins": 4}
        )
        outcomes = compare_strategies(base, seeds=range(10))
        self.assertEqual(len(outcomes), 20)
        by_seed: Dict[int, Dict[str, StrategyOutcome]] = {}
        for o in outcomes:
            by_seed.setdefault(o.seed, {})[o.strategy] = o

        def cost(o: StrategyOutcome) -> float:
            return float(o.measured_samples) if o.converged else float("inf")

        wins = sum(
            1
            for pair in by_seed.values()
            if pair["balanced"].converged and cost(pair["balanced"]) < cost(pair["random"])
        )
        self.assertGreaterEqual(wins, 8, by_seed)


if __name__ == "__main__":
    unittest.main()
