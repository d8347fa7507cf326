from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from services.common.config import backend_command
from services.encoding import parse_scheme
from services.measurement import DEFAULT_QC_THRESHOLD, DEFAULT_RUNS_PER_ARCH, OracleParams
from services.predictor import TrainConfig

from .collect import CollectSettings


class EsmError(RuntimeError):
    pass


class EsmConfigError(EsmError):
    pass


class BackendConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["oracle", "external"] = "oracle"
    command: List[str] = Field(default_factory=list)
    timeout_seconds: Optional[float] = Field(default=None, gt=0)
    oracle: OracleParams = Field(default_factory=OracleParams)


class EsmConfig(BaseModel):
    """User inputs of one ESM run. Unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    spec: str = "resnet"
    seed: int = 0
    strategy: Literal["random", "balanced"] = "balanced"
    scheme: str = "fcc"
    evaluation: Literal["overall", "bin_wise"] = "bin_wise"
    n_bins: int = Field(default=4, ge=1)
    n_initial: int = Field(default=300, ge=1)
    n_step: int = Field(default=100, ge=1)
    w1: float = Field(default=3.0, gt=0)
    w2: float = Field(default=1.0, gt=0)
    acc_th: float = Field(default=0.9, ge=0, le=1)
    max_iterations: int = Field(default=50, ge=1)
    test_size: int = Field(default=1000, ge=1)
    n_refs: int = Field(default=5, ge=0)
    batch_size: int = Field(default=100, ge=1)
    runs_per_arch: int = Field(default=DEFAULT_RUNS_PER_ARCH, ge=5)
    qc_threshold: float = Field(default=DEFAULT_QC_THRESHOLD, ge=0)
    qc_retries: int = Field(default=2, ge=0)
    failure_tolerance: float = Field(default=0.05, ge=0, le=1)
    backend: BackendConfig = Field(default_factory=BackendConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)

    @field_validator("scheme")
    @classmethod
    def _canonical_scheme(cls, v: str) -> str:
        return parse_scheme(v)

    @model_validator(mode="after")
    def _check_sizes(self) -> "EsmConfig":
        if self.strategy == "balanced" and self.n_initial < self.n_bins:
            raise ValueError(
                f"n_initial ({self.n_initial}) must be >= n_bins ({self.n_bins}) for balanced sampling"
            )
        if self.test_size < self.n_bins:
            raise ValueError(f"test_size ({self.test_size}) must be >= n_bins ({self.n_bins})")
        return self

    def collect_settings(self) -> CollectSettings:
        return CollectSettings(
            batch_size=self.batch_size,
            runs_per_arch=self.runs_per_arch,
            qc_threshold=self.qc_threshold,
            qc_retries=self.qc_retries,
            failure_tolerance=self.failure_tolerance,
        )


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err.get("loc", ())) or "<root>"
        parts.append(f"{loc}: {err.get('msg')}")
    return "; ".join(parts)


def config_from_mapping(data: Dict[str, Any], *, source: str = "<mapping>") -> EsmConfig:
    try:
        return EsmConfig.model_validate(data)
    except ValidationError as exc:
        raise EsmConfigError(f"{source}: {_format_validation(exc)}") from exc


def load_config(path: Optional[Path], overrides: Optional[Dict[str, Any]] = None) -> EsmConfig:
    """
    Defaults, then the YAML file, then ESM_BACKEND_* environment, then
    overrides (CLI flags).

    Nested sections merge key by key, so an override of train.epochs keeps
    the other train settings from the file.
    """
    data: Dict[str, Any] = {}
    source = "<defaults>"
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise EsmConfigError(f"config file not found: {path}")
        try:
            loaded = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise EsmConfigError(f"{path}: invalid YAML: {exc}") from exc
        if not isinstance(loaded, dict):
            raise EsmConfigError(f"{path}: top level must be a mapping")
        data = loaded
        source = str(path)
    data = _merge(data, env_overrides())
    if overrides:
        data = _merge(data, overrides)
    return config_from_mapping(data, source=source)


def env_overrides() -> Dict[str, Any]:
    backend: Dict[str, Any] = {}
    command = backend_command()
    if command:
        backend["command"] = command
    raw_timeout = (os.getenv("ESM_BACKEND_TIMEOUT_SECONDS") or "").strip()
    if raw_timeout:
        backend["timeout_seconds"] = raw_timeout
    return {"backend": backend} if backend else {}


def _merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out
