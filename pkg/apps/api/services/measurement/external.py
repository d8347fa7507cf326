from __future__ import annotations

import json
import logging
import subprocess
from typing import Any, Dict, List, Optional, Sequence, Tuple

from services.archspace import ArchConfig, arch_to_dict
from services.common.config import backend_command, backend_timeout_seconds

from .types import (
    BackendDescriptor,
    BackendExitError,
    BackendProtocolError,
    BackendTimeoutError,
)

LOGGER = logging.getLogger(__name__)


def build_request(
    requests: Sequence[Tuple[str, ArchConfig]], *, runs_per_arch: int, batch_id: str
) -> Dict[str, Any]:
    archs = []
    for arch_id, arch in requests:
        record = arch_to_dict(arch)
        archs.append({"arch_id": arch_id, **record})
    return {"batch_id": batch_id, "runs_per_arch": runs_per_arch, "archs": archs}


def _decode_response(stdout: str, batch_id: str) -> Dict[str, Any]:
    text = stdout.strip()
    if not text:
        raise BackendProtocolError("empty response", batch_id=batch_id)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        # Tools may print progress before the final response line.
        last = [line for line in text.splitlines() if line.strip()][-1]
        try:
            data = json.loads(last)
        except json.JSONDecodeError as exc:
            raise BackendProtocolError(
                f"response is not valid JSON: {exc}", batch_id=batch_id
            ) from exc
    if not isinstance(data, dict):
        raise BackendProtocolError("response must be an object", batch_id=batch_id)
    return data


def parse_response(
    data: Dict[str, Any],
    *,
    expected_ids: Sequence[str],
    runs_per_arch: int,
    batch_id: str,
) -> Dict[str, List[float]]:
    if data.get("batch_id") != batch_id:
        raise BackendProtocolError(
            f"response batch_id {data.get('batch_id')!r} does not match",
            batch_id=batch_id,
        )
    results = data.get("results")
    if not isinstance(results, list):
        raise BackendProtocolError("response.results must be a list", batch_id=batch_id)

    out: Dict[str, List[float]] = {}
    for item in results:
        if not isinstance(item, dict) or not isinstance(item.get("arch_id"), str):
            raise BackendProtocolError("result without arch_id", batch_id=batch_id)
        arch_id = item["arch_id"]
        runs = item.get("runs_ms")
        if not isinstance(runs, list):
            raise BackendProtocolError(
                f"{arch_id}: runs_ms must be a list", batch_id=batch_id
            )
        if len(runs) != runs_per_arch:
            raise BackendProtocolError(
                f"{arch_id}: expected {runs_per_arch} runs, got {len(runs)}",
                batch_id=batch_id,
            )
        try:
            values = [float(r) for r in runs]
        except (TypeError, ValueError) as exc:
            raise BackendProtocolError(
                f"{arch_id}: runs_ms must be numbers", batch_id=batch_id
            ) from exc
        out[arch_id] = values

    missing = [i for i in expected_ids if i not in out]
    if missing:
        raise BackendProtocolError(
            f"response missing arch_id {', '.join(missing)}", batch_id=batch_id
        )
    return out


def external_backend_exchange(
    requests: Sequence[Tuple[str, ArchConfig]],
    *,
    command: Sequence[str],
    runs_per_arch: int,
    batch_id: str,
    timeout: float = 600.0,
) -> Dict[str, List[float]]:
    """
    One request/response round trip with a user-supplied measurement command.

    The request goes to stdin as one JSON line; the response is read from
    stdout. stderr is forwarded to the log.
    """
    if not command:
        raise BackendExitError("no backend command configured", batch_id=batch_id)
    payload = build_request(requests, runs_per_arch=runs_per_arch, batch_id=batch_id)
    LOGGER.info(
        "batch %s: sending %d archs to %s", batch_id, len(requests), command[0]
    )
    try:
        proc = subprocess.run(
            list(command),
            input=json.dumps(payload) + "\n",
            capture_output=True,
            text=True,
            timeout=timeout,
            check=False,
        )
    except FileNotFoundError as exc:
        raise BackendExitError(
            f"backend command not found: {command[0]}", batch_id=batch_id
        ) from exc
    except subprocess.TimeoutExpired as exc:
        raise BackendTimeoutError(
            f"backend timed out after {timeout:g}s", batch_id=batch_id
        ) from exc

    for line in (proc.stderr or "").splitlines():
        if line.strip():
            LOGGER.info("batch %s backend: %s", batch_id, line)

    if proc.returncode != 0:
        tail = (proc.stderr or "").strip().splitlines()[-1:] or [""]
        raise BackendExitError(
            f"backend exited with {proc.returncode}: {tail[0]}", batch_id=batch_id
        )

    data = _decode_response(proc.stdout or "", batch_id)
    return parse_response(
        data,
        expected_ids=[arch_id for arch_id, _ in requests],
        runs_per_arch=runs_per_arch,
        batch_id=batch_id,
    )


class ExternalBackend:
    def __init__(
        self,
        command: Optional[Sequence[str]] = None,
        *,
        timeout: Optional[float] = None,
        backend_id: str = "external",
    ) -> None:
        self._command = list(command) if command else backend_command()
        self._timeout = timeout if timeout is not None else backend_timeout_seconds()
        self._backend_id = backend_id

    @property
    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(
            backend_id=self._backend_id,
            kind="external",
            deterministic=False,
            params={"command": list(self._command), "timeout": self._timeout},
        )

    def measure(
        self,
        requests: Sequence[Tuple[str, ArchConfig]],
        *,
        runs_per_arch: int,
        batch_id: str,
        seed: int,
    ) -> Dict[str, List[float]]:
        return external_backend_exchange(
            requests,
            command=self._command,
            runs_per_arch=runs_per_arch,
            batch_id=batch_id,
            timeout=self._timeout,
        )
