from __future__ import annotations

import subprocess
import sys
import unittest
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest.mock import patch

from services.archspace import load_spec, sample_random
from services.measurement import (
    BackendExitError,
    BackendProtocolError,
    BackendTimeoutError,
    ExternalBackend,
    measure_batch,
)
from services.measurement.external import build_request

FAKE_DEVICE = r'''
import json
import sys

mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
request = json.loads(sys.stdin.readline())
print("warming up", file=sys.stderr)
if mode == "crash":
    print("device lost", file=sys.stderr)
    sys.exit(3)
results = []
for i, arch in enumerate(request["archs"]):
    n = request["runs_per_arch"]
    if mode == "short":
        n -= 1
    runs = [1.0 + sum(arch["unit_depths"]) * 0.1] * n
    results.append({"arch_id": arch["arch_id"], "runs_ms": runs})
if mode == "missing":
    results = results[1:]
print("progress 100%")
print(json.dumps({"batch_id": request["batch_id"], "results": results}))
'''


class TestExternalBackend(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = TemporaryDirectory()
        self.script = Path(self._tmp.name) / "fake_device.py"
        self.script.write_text(FAKE_DEVICE, encoding="utf-8")
        self.spec = load_spec("resnet")
        self.archs = sample_random(self.spec, 3, seed=0)

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def _backend(self, mode: str = "ok") -> ExternalBackend:
        return ExternalBackend([sys.executable, str(self.script), mode], timeout=30)

    def test_round_trip(self) -> None:
        result = measure_batch(self._backend(), self.archs, runs_per_arch=5, batch_id="ext")
        self.assertEqual(result.backend_id, "external")
        self.assertEqual(len(result.measured), 3)
        for m, arch in zip(result.measured, self.archs):
            self.assertAlmostEqual(m.latency_ms, 1.0 + sum(arch.unit_depths) * 0.1)

    def test_stderr_lines_are_logged(self) -> None:
        with self.assertLogs("services.measurement.external", level="INFO") as logs:
            measure_batch(self._backend(), self.archs, runs_per_arch=5, batch_id="log")
        self.assertTrue(any("batch log backend: warming up" in line for line in logs.output))

    def test_missing_arch_id(self) -> None:
        with self.assertRaises(BackendProtocolError) as ctx:
            measure_batch(self._backend("missing"), self.archs, runs_per_arch=5, batch_id="m")
        self.assertIn("m-00000", str(ctx.exception))
        self.assertEqual(ctx.exception.batch_id, "m")

    def test_wrong_run_count(self) -> None:
        with self.assertRaises(BackendProtocolError):
            measure_batch(self._backend("short"), self.archs, runs_per_arch=5)

    def test_nonzero_exit(self) -> None:
        with self.assertRaises(BackendExitError) as ctx:
            measure_batch(self._backend("crash"), self.archs, runs_per_arch=5)
        self.assertIn("device lost", str(ctx.exception))

    def test_timeout(self) -> None:
        with patch(
            "services.measurement.external.subprocess.run",
            side_effect=subprocess.TimeoutExpired(cmd="x", timeout=1),
        ):
            with self.assertRaises(BackendTimeoutError):
                measure_batch(self._backend(), self.archs, runs_per_arch=5)

    def test_unknown_command(self) -> None:
        backend = ExternalBackend([str(Path(self._tmp.name) / "nope")], timeout=5)
        with self.assertRaises(BackendExitError):
            measure_batch(backend, self.archs, runs_per_arch=5)

    def test_request_shape(self) -> None:
        payload = build_request([("a-1", self.archs[0])], runs_per_arch=7, batch_id="b")
        self.assertEqual(payload["batch_id"], "b")
        self.assertEqual(payload["runs_per_arch"], 7)
        self.assertEqual(payload["archs"][0]["arch_id"], "a-1")
        self.assertEqual(payload["archs"][0]["spec_name"], "resnet")


if __name__ == "__main__":
    unittest.main()
