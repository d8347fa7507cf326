from __future__ import annotations

from pathlib import Path
from typing import Any, Dict

import numpy as np

from services.common.util import atomic_write_json, load_json, utc_iso

from .mlp import MlpModel, PredictorError

CHECKPOINT_FORMAT = "esm-mlp/1"


def model_to_dict(model: MlpModel) -> Dict[str, Any]:
    return {
        "format": CHECKPOINT_FORMAT,
        "saved_at": utc_iso(),
        "spec_name": model.spec_name,
        "scheme": model.scheme,
        "spec": model.spec or None,
        "activation": model.activation,
        "target_transform": model.target_transform,
        "feature_mean": model.feature_mean.tolist(),
        "feature_std": model.feature_std.tolist(),
        "target_mean": model.target_mean,
        "target_std": model.target_std,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "meta": model.meta,
    }


def model_from_dict(data: Dict[str, Any]) -> MlpModel:
    if data.get("format") != CHECKPOINT_FORMAT:
        raise PredictorError(f"unsupported checkpoint format: {data.get('format')!r}")
    try:
        return MlpModel(
            weights=tuple(np.asarray(w, dtype=float) for w in data["weights"]),
            biases=tuple(np.asarray(b, dtype=float) for b in data["biases"]),
            feature_mean=np.asarray(data["feature_mean"], dtype=float),
            feature_std=np.asarray(data["feature_std"], dtype=float),
            target_mean=float(data["target_mean"]),
            target_std=float(data["target_std"]),
            activation=data["activation"],
            target_transform=data["target_transform"],
            spec_name=str(data.get("spec_name") or ""),
            scheme=str(data.get("scheme") or ""),
            spec=dict(data.get("spec") or {}),
            meta=dict(data.get("meta") or {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PredictorError(f"malformed checkpoint: {exc}") from exc


def save_model(model: MlpModel, path: Path) -> None:
    atomic_write_json(Path(path), model_to_dict(model))


def load_model(path: Path) -> MlpModel:
    path = Path(path)
    if not path.is_file():
        raise PredictorError(f"model file not found: {path}")
    return model_from_dict(load_json(path))
