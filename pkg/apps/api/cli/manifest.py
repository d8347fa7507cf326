from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from services.common.util import atomic_write_json, load_json, utc_iso

from . import __version__


@dataclass
class RunManifest:
    """Everything needed to replay one command with the synthetic backend."""

    command: str
    config: Dict[str, Any]
    seeds: Dict[str, int] = field(default_factory=dict)
    args: Dict[str, Any] = field(default_factory=dict)
    artifacts: Dict[str, str] = field(default_factory=dict)
    tool_version: str = __version__
    started_at: str = field(default_factory=utc_iso)
    finished_at: Optional[str] = None
    status: str = "running"
    exit_code: Optional[int] = None

    def add_artifact(self, name: str, path: Path) -> None:
        self.artifacts[name] = str(path)

    def finish(self, status: str, exit_code: int) -> None:
        self.status = status
        self.exit_code = exit_code
        self.finished_at = utc_iso()

    def write(self, path: Path) -> None:
        atomic_write_json(Path(path), asdict(self))


def manifest_path(artifact: Path) -> Path:
    """`<dir>/manifest.json` for run directories, `<stem>.manifest.json` beside files."""
    artifact = Path(artifact)
    if artifact.is_dir():
        return artifact / "manifest.json"
    return artifact.with_name(f"{artifact.stem}.manifest.json")


def read_manifest(path: Path) -> RunManifest:
    data = load_json(Path(path))
    if not data:
        raise FileNotFoundError(f"no manifest at {path}")
    return RunManifest(**data)
