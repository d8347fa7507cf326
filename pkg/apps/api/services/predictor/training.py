from __future__ import annotations

import logging
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from services.archspace import spec_to_mapping
from services.dataset import LatencyDataset, encoded_matrix, latencies, training_samples

from .mlp import (
    MlpModel,
    PredictorError,
    init_params,
    loss_and_grads,
    normalization_stats,
)

LOGGER = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(default=0.01, gt=0)
    weight_decay: float = Field(default=1e-4, ge=0)
    epochs: int = Field(default=300, ge=1)
    batch_size: int = Field(default=256, ge=1)
    seed: int = 0
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)
    hidden_layers: int = Field(default=3, ge=1)
    hidden_width: int = Field(default=64, ge=1)
    activation: Literal["relu", "linear"] = "relu"
    target_transform: Literal["none", "log"] = "none"


class AdamW:
    """Adam with decoupled weight decay; decay touches weight matrices only."""

    def __init__(self, params: List[np.ndarray], decay_mask: List[bool], cfg: TrainConfig):
        self.params = params
        self.decay_mask = decay_mask
        self.cfg = cfg
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: List[np.ndarray]) -> None:
        cfg = self.cfg
        self.t += 1
        c1 = 1.0 - cfg.beta1**self.t
        c2 = 1.0 - cfg.beta2**self.t
        for p, g, m, v, decay in zip(self.params, grads, self.m, self.v, self.decay_mask):
            if decay and cfg.weight_decay:
                p *= 1.0 - cfg.learning_rate * cfg.weight_decay
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * g * g
            p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.epsilon)


def fit(
    x: np.ndarray,
    y: np.ndarray,
    cfg: Optional[TrainConfig] = None,
    *,
    spec_name: str = "",
    scheme: str = "",
    spec: Optional[Dict[str, Any]] = None,
) -> MlpModel:
    """
    Train a fresh model on a feature matrix and latency vector.

    Everything random (init, shuffling) is drawn from cfg.seed, so the same
    inputs and config always give bit-identical weights.
    """
    cfg = cfg or TrainConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or len(x) == 0:
        raise PredictorError("training set is empty")
    if len(y) != len(x):
        raise PredictorError(f"{len(x)} inputs but {len(y)} targets")
    if cfg.target_transform == "log":
        if np.any(y <= 0):
            raise PredictorError("log target transform needs positive latencies")
        y = np.log(y)

    feature_mean, feature_std = normalization_stats(x)
    xn = (x - feature_mean) / feature_std
    target_mean = float(y.mean())
    target_std = float(y.std())
    if target_std <= 1e-12 * max(1.0, abs(target_mean)):
        target_std = 1.0

    hidden = [cfg.hidden_width] * cfg.hidden_layers
    weights, biases = init_params(x.shape[1], hidden, cfg.seed)
    params = [*weights, *biases]
    opt = AdamW(params, [True] * len(weights) + [False] * len(biases), cfg)
    rng = np.random.default_rng(cfg.seed + 1)
    n = len(x)

    loss = float("nan")
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, g_w, g_b = loss_and_grads(
                weights, biases, xn[idx], y[idx], cfg.activation, target_mean, target_std
            )
            if not np.isfinite(loss):
                raise PredictorError(
                    f"training diverged at epoch {epoch} batch {start // cfg.batch_size}: "
                    f"loss={loss} lr={cfg.learning_rate}"
                )
            opt.step([*g_w, *g_b])
        if epoch % 50 == 0 or epoch == cfg.epochs - 1:
            LOGGER.debug("epoch %d loss %.6g", epoch, loss)

    return MlpModel(
        weights=tuple(weights),
        biases=tuple(biases),
        feature_mean=feature_mean,
        feature_std=feature_std,
        target_mean=target_mean,
        target_std=target_std,
        activation=cfg.activation,
        target_transform=cfg.target_transform,
        spec_name=spec_name,
        scheme=scheme,
        spec=dict(spec or {}),
        meta={"train_config": cfg.model_dump(), "n_train": n},
    )


def train(train_set: LatencyDataset, cfg: Optional[TrainConfig] = None) -> MlpModel:
    samples = training_samples(train_set)
    if not samples:
        raise PredictorError("training set is empty")
    x = encoded_matrix(train_set, samples)
    y = latencies(samples)
    LOGGER.info(
        "training on %d samples (%s, %d features)", len(samples), train_set.scheme, x.shape[1]
    )
    return fit(
        x,
        y,
        cfg,
        spec_name=train_set.spec_name,
        scheme=train_set.scheme,
        spec=spec_to_mapping(train_set.spec),
    )
