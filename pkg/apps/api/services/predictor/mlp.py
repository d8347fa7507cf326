from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Sequence, Tuple

import numpy as np

Activation = Literal["relu", "linear"]
TargetTransform = Literal["none", "log"]


class PredictorError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MlpModel:
    """
    Fully-connected regressor: standardized input -> hidden layers -> scalar.

    The scalar output is mapped back to milliseconds through the training
    target statistics (pred = net * target_std + target_mean), so the loss is
    taken on raw milliseconds while the network works at unit scale.
    """

    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    feature_mean: np.ndarray
    feature_std: np.ndarray
    target_mean: float = 0.0
    target_std: float = 1.0
    activation: Activation = "relu"
    target_transform: TargetTransform = "none"
    spec_name: str = ""
    scheme: str = ""
    # the full space as a mapping; empty for models fitted on bare matrices
    spec: Dict[str, object] = field(default_factory=dict)
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for arr in (*self.weights, *self.biases, self.feature_mean, self.feature_std):
            arr.setflags(write=False)
        dims = [w.shape for w in self.weights]
        for (_, out_dim), (in_dim, _) in zip(dims, dims[1:]):
            if out_dim != in_dim:
                raise PredictorError("layer shapes do not chain")
        if dims[-1][1] != 1:
            raise PredictorError("output layer must be scalar")
        if np.any(self.feature_std <= 0):
            raise PredictorError("normalization stds must be > 0")

    @property
    def input_dim(self) -> int:
        return int(self.weights[0].shape[0])

    @property
    def hidden(self) -> Tuple[int, ...]:
        return tuple(int(w.shape[1]) for w in self.weights[:-1])


def init_params(
    input_dim: int, hidden: Sequence[int], seed: int
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    # Uniform fan-in scaling, one seeded stream for all layers.
    rng = np.random.default_rng(seed)
    sizes = [input_dim, *hidden, 1]
    weights: List[np.ndarray] = []
    biases: List[np.ndarray] = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=(fan_out,)))
    return weights, biases


def normalization_stats(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return mean, std


def _act(z: np.ndarray, activation: str) -> np.ndarray:
    return np.maximum(z, 0.0) if activation == "relu" else z


def forward(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    xn: np.ndarray,
    activation: str,
) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """Returns (net output, layer inputs, pre-activations)."""
    inputs: List[np.ndarray] = []
    pre: List[np.ndarray] = []
    h = xn
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        inputs.append(h)
        z = h @ w + b
        pre.append(z)
        h = z if i == last else _act(z, activation)
    return h[:, 0], inputs, pre


def loss_and_grads(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    xn: np.ndarray,
    y: np.ndarray,
    activation: str,
    target_mean: float,
    target_std: float,
) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    """Mean squared error on de-standardized outputs and its gradients."""
    out, inputs, pre = forward(weights, biases, xn, activation)
    pred = out * target_std + target_mean
    err = pred - y
    n = len(y)
    loss = float(np.mean(err * err))

    grad = (2.0 / n) * err * target_std
    delta = grad[:, None]
    g_w: List[np.ndarray] = [np.empty(0)] * len(weights)
    g_b: List[np.ndarray] = [np.empty(0)] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        g_w[i] = inputs[i].T @ delta
        g_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ weights[i].T
            if activation == "relu":
                delta = delta * (pre[i - 1] > 0)
    return loss, g_w, g_b


def _to_target(model: MlpModel, out: np.ndarray) -> np.ndarray:
    pred = out * model.target_std + model.target_mean
    if model.target_transform == "log":
        return np.exp(pred)
    return pred


def predict_many(model: MlpModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise PredictorError(
            f"input length {x.shape[-1] if x.ndim else 0} != model input {model.input_dim}"
        )
    xn = (x - model.feature_mean) / model.feature_std
    out, _, _ = forward(model.weights, model.biases, xn, model.activation)
    return _to_target(model, out)


def predict(model: MlpModel, encoded: Sequence[float]) -> float:
    values = np.asarray(getattr(encoded, "values", encoded), dtype=float)
    if values.ndim != 1 or len(values) != model.input_dim:
        raise PredictorError(
            f"input length {values.size} != model input {model.input_dim}"
        )
    value = float(predict_many(model, values[None, :])[0])
    if not np.isfinite(value):
        raise PredictorError("non-finite prediction")
    return value
