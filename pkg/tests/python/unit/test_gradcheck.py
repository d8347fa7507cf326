from __future__ import annotations

import unittest
from unittest.mock import patch

import numpy as np

from services.predictor import (
    MlpModel,
    PredictorError,
    analytic_gradients,
    gradient_check,
    gradient_check_report,
)
from services.predictor import gradcheck
from services.predictor.mlp import init_params, loss_and_grads


def _model(input_dim: int, hidden: list[int], seed: int, activation: str = "relu") -> MlpModel:
    weights, biases = init_params(input_dim, hidden, seed)
    return MlpModel(
        weights=tuple(weights),
        biases=tuple(biases),
        feature_mean=np.zeros(input_dim),
        feature_std=np.ones(input_dim),
        activation=activation,  # type: ignore[arg-type]
    )


class TestGradientCheck(unittest.TestCase):
    def test_random_small_relu_models(self) -> None:
        rng = np.random.default_rng(0)
        for seed in range(100):
            width = int(rng.integers(2, 6))
            model = _model(3, [width, width], seed)
            x = rng.normal(size=3)
            y = float(rng.uniform(0.5, 2.0))
            report = gradient_check_report(model, (x, y))
            self.assertLess(report.max_error, 1e-3, f"seed {seed}")
            self.assertGreater(report.checked, 0, f"seed {seed}")
            n_params = sum(w.size for w in model.weights) + sum(b.size for b in model.biases)
            self.assertEqual(report.checked + report.skipped_at_kinks, n_params)

    def test_linear_activation_checks_every_parameter(self) -> None:
        rng = np.random.default_rng(1)
        for seed in range(10):
            model = _model(4, [5, 3], seed, activation="linear")
            report = gradient_check_report(model, (rng.normal(size=4), float(rng.uniform(1, 3))))
            self.assertLess(report.max_error, 1e-4)
            self.assertEqual(report.skipped_at_kinks, 0)

    def test_error_is_relative_to_the_analytic_gradient(self) -> None:
        # Doubling every analytic gradient gives |2g - g| / (|2g| + 1e-8) ~ 0.5.
        def doubled(*args, **kwargs):
            loss, g_w, g_b = loss_and_grads(*args, **kwargs)
            return loss, [2.0 * g for g in g_w], [2.0 * g for g in g_b]

        model = _model(3, [4], 7, activation="linear")
        sample = (np.array([0.4, -1.2, 0.8]), 2.0)
        with patch.object(gradcheck, "loss_and_grads", side_effect=doubled):
            error = gradient_check(model, sample)
        self.assertAlmostEqual(error, 0.5, delta=1e-3)

    def test_zero_output_layer(self) -> None:
        weights, biases = init_params(3, [4], 2)
        weights[-1] = np.zeros_like(weights[-1])
        model = MlpModel(
            weights=tuple(weights),
            biases=tuple(biases),
            feature_mean=np.zeros(3),
            feature_std=np.ones(3),
        )
        x = np.array([0.3, -0.2, 0.9])
        _, g_w, _ = analytic_gradients(model, x, 1.0)
        self.assertTrue(np.all(g_w[0] == 0.0))
        self.assertLess(gradient_check(model, (x, 1.0)), 1e-3)

    def test_target_statistics_scale_the_gradient(self) -> None:
        base = _model(2, [3], 5)
        scaled = MlpModel(
            weights=base.weights,
            biases=base.biases,
            feature_mean=base.feature_mean,
            feature_std=base.feature_std,
            target_mean=4.0,
            target_std=2.0,
        )
        x = np.array([0.5, -1.0])
        self.assertLess(gradient_check(scaled, (x, 7.0)), 1e-3)

    def test_epsilon_must_be_positive(self) -> None:
        with self.assertRaises(PredictorError):
            gradient_check(_model(2, [3], 0), (np.zeros(2), 1.0), epsilon=0.0)


if __name__ == "__main__":
    unittest.main()
