from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from services.archspace import (
    ArchConfig,
    DepthBins,
    SpecError,
    SupernetSpec,
    arch_from_dict,
    arch_to_dict,
    spec_from_mapping,
    spec_to_mapping,
    validate_arch,
)
from services.common.util import atomic_write_text
from services.encoding import SCHEMES

from .models import DatasetError, LatencyDataset, Sample

FORMAT_VERSION = 1


class DatasetVersionError(DatasetError):
    pass


class DatasetChecksumError(DatasetError):
    pass


class DatasetSchemaError(DatasetError):
    pass


class _BinsRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_bins: int = Field(..., ge=1)
    edges: List[int]


class HeaderRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: str = "header"
    format_version: int = Field(..., ge=1)
    spec: Dict[str, Any]
    scheme: str
    bins: _BinsRecord
    refs: List[Dict[str, Any]] = Field(default_factory=list)
    version: int = Field(default=1, ge=1)
    seeds: Dict[str, int] = Field(default_factory=dict)
    backend: Dict[str, Any] = Field(default_factory=dict)


class SampleRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: str = "sample"
    sample_id: str = Field(..., min_length=1)
    batch_id: str
    latency_ms: float = Field(..., gt=0)
    is_reference: bool = False
    ref_index: Optional[int] = None
    arch: Dict[str, Any]
    encoded: Optional[List[float]] = None


def _checksum(lines: List[str]) -> str:
    digest = hashlib.sha256()
    for line in lines:
        digest.update(line.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def dump_records(header: Dict[str, Any], records: List[Dict[str, Any]]) -> str:
    lines = [json.dumps(header, separators=(",", ":"))]
    lines.extend(json.dumps(r, separators=(",", ":")) for r in records)
    trailer = {"record": "checksum", "sha256": _checksum(lines)}
    lines.append(json.dumps(trailer, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def read_records(path: Path, *, kind: str) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
    """
    Verify the trailing checksum and the format version, then return the
    header and body records of a JSONL artifact.
    """
    if not path.is_file():
        raise DatasetError(f"{kind} file not found: {path}")
    lines = [ln for ln in path.read_text(encoding="utf-8").split("\n") if ln.strip()]
    if not lines:
        raise DatasetChecksumError(f"{path}: empty file")
    try:
        trailer = json.loads(lines[-1])
    except json.JSONDecodeError:
        trailer = None
    if not isinstance(trailer, dict) or trailer.get("record") != "checksum":
        raise DatasetChecksumError(f"{path}: missing checksum record (truncated?)")
    if trailer.get("sha256") != _checksum(lines[:-1]):
        raise DatasetChecksumError(f"{path}: checksum mismatch")

    try:
        parsed = [json.loads(ln) for ln in lines[:-1]]
    except json.JSONDecodeError as exc:
        raise DatasetSchemaError(f"{path}: invalid JSON record: {exc}") from exc
    if not parsed or not isinstance(parsed[0], dict) or parsed[0].get("record") != "header":
        raise DatasetSchemaError(f"{path}: first record must be the header")
    header = parsed[0]
    version = header.get("format_version")
    if not isinstance(version, int) or version > FORMAT_VERSION or version < 1:
        raise DatasetVersionError(
            f"{path}: unsupported format_version {version!r} (supported <= {FORMAT_VERSION})"
        )
    return header, parsed[1:]


def _schema_error(path: Path, exc: ValidationError) -> DatasetSchemaError:
    first = exc.errors()[0] if exc.errors() else {}
    loc = ".".join(str(x) for x in first.get("loc", ()))
    return DatasetSchemaError(f"{path}: {loc}: {first.get('msg', exc)}")


def save_dataset(ds: LatencyDataset, path: Path) -> None:
    header = {
        "record": "header",
        "format_version": FORMAT_VERSION,
        "spec": spec_to_mapping(ds.spec),
        "scheme": ds.scheme,
        "bins": {"n_bins": ds.bins.n_bins, "edges": list(ds.bins.edges)},
        "refs": [arch_to_dict(a) for a in ds.refs],
        "version": ds.version,
        "seeds": dict(ds.seeds),
        "backend": dict(ds.backend),
    }
    records = [
        {
            "record": "sample",
            "sample_id": s.sample_id,
            "batch_id": s.batch_id,
            "latency_ms": s.latency_ms,
            "is_reference": s.is_reference,
            "ref_index": s.ref_index,
            "arch": arch_to_dict(s.arch),
            "encoded": list(s.encoded) if s.encoded is not None else None,
        }
        for s in ds.samples
    ]
    atomic_write_text(Path(path), dump_records(header, records))


def _checked_arch(spec: SupernetSpec, raw: Dict[str, Any], where: str) -> ArchConfig:
    arch = arch_from_dict(raw)
    try:
        validate_arch(spec, arch)
    except SpecError as exc:
        raise DatasetSchemaError(f"{where}: {exc}") from exc
    return arch


def load_dataset(path: Path) -> LatencyDataset:
    path = Path(path)
    raw_header, body = read_records(path, kind="dataset")
    try:
        header = HeaderRecord.model_validate(raw_header)
    except ValidationError as exc:
        raise _schema_error(path, exc) from exc
    if header.scheme not in SCHEMES:
        raise DatasetSchemaError(f"{path}: unknown scheme tag '{header.scheme}'")

    try:
        spec = spec_from_mapping(header.spec, source=f"{path}:header.spec")
        refs = tuple(
            _checked_arch(spec, a, f"{path}: ref {j}") for j, a in enumerate(header.refs)
        )
        samples: List[Sample] = []
        for raw in body:
            if not isinstance(raw, dict) or raw.get("record") != "sample":
                raise DatasetSchemaError(f"{path}: unexpected record {raw!r:.80}")
            rec = SampleRecord.model_validate(raw)
            samples.append(
                Sample(
                    sample_id=rec.sample_id,
                    arch=_checked_arch(spec, rec.arch, f"{path}: sample {rec.sample_id}"),
                    latency_ms=rec.latency_ms,
                    batch_id=rec.batch_id,
                    is_reference=rec.is_reference,
                    ref_index=rec.ref_index,
                    encoded=tuple(rec.encoded) if rec.encoded is not None else None,
                )
            )
    except ValidationError as exc:
        raise _schema_error(path, exc) from exc
    except SpecError as exc:
        raise DatasetSchemaError(str(exc)) from exc

    return LatencyDataset(
        spec=spec,
        scheme=header.scheme,  # type: ignore[arg-type]
        bins=DepthBins(n_bins=header.bins.n_bins, edges=tuple(header.bins.edges)),
        samples=tuple(samples),
        refs=refs,
        version=header.version,
        seeds=dict(header.seeds),
        backend=dict(header.backend),
    )
