from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import ValidationError

from .models import SpecError, SupernetSpec

PRESETS = ("resnet", "mobilenetv3", "densenet")


def presets_root() -> Path:
    return Path(__file__).resolve().parents[2] / "presets"


def _extra_root() -> Optional[Path]:
    raw = (os.getenv("ESM_SPEC_DIR") or "").strip()
    return Path(raw) if raw else None


def _format_validation(exc: ValidationError) -> str:
    parts: List[str] = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err.get("loc", ())) or "<root>"
        parts.append(f"{loc}: {err.get('msg')}")
    return "; ".join(parts)


def spec_from_mapping(data: Any, *, source: str = "<mapping>") -> SupernetSpec:
    if not isinstance(data, dict):
        raise SpecError(f"{source}: spec document must be a mapping")
    try:
        return SupernetSpec.model_validate(data)
    except ValidationError as exc:
        raise SpecError(f"{source}: {_format_validation(exc)}") from exc


def spec_to_mapping(spec: SupernetSpec) -> Dict[str, Any]:
    return spec.model_dump(mode="json")


def _read_yaml(path: Path) -> Any:
    try:
        return yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise SpecError(f"{path}: invalid YAML: {exc}") from exc


def load_spec(ref: str | Path) -> SupernetSpec:
    """
    Resolve a preset name (resnet, mobilenetv3, densenet or a file in
    ESM_SPEC_DIR) or a path to a YAML spec document.
    """
    raw = str(ref).strip()
    path = Path(raw)
    if not path.suffix:
        for root in (_extra_root(), presets_root()):
            if root is None:
                continue
            candidate = root / f"{raw}.yml"
            if candidate.is_file():
                path = candidate
                break
    if not path.is_file():
        raise SpecError(f"unknown spec '{raw}' (presets: {', '.join(PRESETS)})")
    return spec_from_mapping(_read_yaml(path), source=str(path))
