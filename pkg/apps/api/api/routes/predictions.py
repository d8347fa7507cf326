from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Tuple

from fastapi import APIRouter, HTTPException

from api.schemas.prediction import PredictionIn, PredictionOut
from services.archspace import ArchConfig, SpecError, SupernetSpec, load_spec, spec_from_mapping
from services.common.config import env_path
from services.encoding import EncodingError, encode_many
from services.predictor import MlpModel, PredictorError, load_model, predict_many

router = APIRouter(prefix="/predictions", tags=["predictions"])


@lru_cache(maxsize=4)
def _load(path: str) -> Tuple[MlpModel, SupernetSpec]:
    model = load_model(Path(path))
    if model.spec:
        return model, spec_from_mapping(model.spec, source=path)
    return model, load_spec(model.spec_name)


def _model() -> Tuple[MlpModel, SupernetSpec]:
    path = env_path("ESM_MODEL_PATH")
    if path is None:
        raise HTTPException(status_code=503, detail="ESM_MODEL_PATH is not set")
    try:
        return _load(str(path))
    except (PredictorError, SpecError) as exc:
        raise HTTPException(status_code=503, detail=str(exc)) from exc


@router.post("", response_model=PredictionOut)
def predict_latencies(payload: PredictionIn) -> PredictionOut:
    model, spec = _model()
    archs = [
        ArchConfig(
            spec_name=spec.name,
            unit_depths=tuple(a.unit_depths),
            block_features=tuple(tuple(tuple(b) for b in unit) for unit in a.block_features),
            unit_features=tuple(tuple(u) for u in a.unit_features)
            or tuple(() for _ in a.unit_depths),
        )
        for a in payload.archs
    ]
    try:
        matrix = encode_many(spec, archs, model.scheme)
        values = predict_many(model, matrix)
    except EncodingError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except PredictorError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    return PredictionOut(
        spec=spec.name, scheme=model.scheme, latencies_ms=[float(v) for v in values]
    )
