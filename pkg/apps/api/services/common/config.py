from __future__ import annotations

import os
import shlex
from pathlib import Path
from typing import List, Optional


def env_bool(name: str, default: bool = False) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def env_float(name: str, default: float) -> float:
    raw = (os.getenv(name) or "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def env_path(name: str) -> Optional[Path]:
    raw = (os.getenv(name) or "").strip()
    if not raw:
        return None
    return Path(raw)


def state_dir() -> Path:
    raw = (os.getenv("ESM_STATE_DIR", "state") or "state").strip()
    return Path(raw)


def backend_command() -> List[str]:
    raw = (os.getenv("ESM_BACKEND_COMMAND") or "").strip()
    return shlex.split(raw) if raw else []


def backend_timeout_seconds() -> float:
    return env_float("ESM_BACKEND_TIMEOUT_SECONDS", 600.0)
