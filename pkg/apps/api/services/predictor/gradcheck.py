from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .mlp import MlpModel, PredictorError, forward, loss_and_grads

LOGGER = logging.getLogger(__name__)


def _prepare(model: MlpModel, x: Sequence[float], y: float) -> Tuple[np.ndarray, np.ndarray]:
    xn = (np.asarray(x, dtype=float)[None, :] - model.feature_mean) / model.feature_std
    target = np.log(y) if model.target_transform == "log" else float(y)
    return xn, np.asarray([target], dtype=float)


def analytic_gradients(
    model: MlpModel, x: Sequence[float], y: float
) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    xn, t = _prepare(model, x, y)
    return loss_and_grads(
        model.weights, model.biases, xn, t, model.activation, model.target_mean, model.target_std
    )


def _relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / (abs(analytic) + 1e-8)


@dataclass(frozen=True)
class GradientCheckReport:
    max_error: float
    checked: int
    skipped_at_kinks: int


def gradient_check_report(
    model: MlpModel, sample: Tuple[Sequence[float], float], epsilon: float = 1e-4
) -> GradientCheckReport:
    """
    Compare backprop gradients with central differences, one parameter at a
    time, as |analytic - numeric| / (|analytic| + 1e-8).

    With ReLU, a parameter whose +-epsilon perturbation flips any hidden gate
    is excluded and counted in skipped_at_kinks.
    """
    if epsilon <= 0:
        raise PredictorError("epsilon must be > 0")
    x, y = sample
    xn, t = _prepare(model, x, y)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    _, g_w, g_b = loss_and_grads(
        weights, biases, xn, t, model.activation, model.target_mean, model.target_std
    )
    analytic = [*g_w, *g_b]
    params = [*weights, *biases]

    def loss_and_gates() -> Tuple[float, List[np.ndarray]]:
        loss, _, _ = loss_and_grads(
            weights, biases, xn, t, model.activation, model.target_mean, model.target_std
        )
        _, _, pre = forward(weights, biases, xn, model.activation)
        return loss, [z > 0 for z in pre[:-1]]

    _, gates = loss_and_gates()
    worst = 0.0
    checked = 0
    skipped = 0
    for p, g in zip(params, analytic):
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + epsilon
            plus, gates_plus = loss_and_gates()
            p[idx] = orig - epsilon
            minus, gates_minus = loss_and_gates()
            p[idx] = orig
            if model.activation == "relu" and not all(
                np.array_equal(a, b) and np.array_equal(a, c)
                for a, b, c in zip(gates, gates_plus, gates_minus)
            ):
                skipped += 1
                continue
            numeric = (plus - minus) / (2.0 * epsilon)
            worst = max(worst, _relative_error(float(g[idx]), numeric))
            checked += 1
    if skipped:
        LOGGER.info(
            "gradient check excluded %d of %d parameters at ReLU kinks",
            skipped,
            skipped + checked,
        )
    return GradientCheckReport(max_error=float(worst), checked=checked, skipped_at_kinks=skipped)


def gradient_check(
    model: MlpModel, sample: Tuple[Sequence[float], float], epsilon: float = 1e-4
) -> float:
    """Max relative error between backprop gradients and central differences."""
    return gradient_check_report(model, sample, epsilon).max_error
