from __future__ import annotations

import random
import unittest
from typing import Dict, Sequence, Tuple

from services.archspace import ArchConfig, load_spec, sample_random
from services.measurement import (
    AggregationError,
    BackendDescriptor,
    OracleBackend,
    OracleParams,
    aggregate_latency,
    failure_rate,
    inject_references,
    kernel_transitions,
    measure_batch,
    oracle_latency,
    oracle_mean,
    reference_positions,
)


def _resnet_arch(depths: Sequence[int], kernels: Sequence[Sequence[int]]) -> ArchConfig:
    return ArchConfig(
        spec_name="resnet",
        unit_depths=tuple(depths),
        block_features=tuple(tuple((k, 0) for k in unit) for unit in kernels),
        unit_features=tuple(() for _ in depths),
    )


class _ScriptedBackend:
    """Returns canned runs per position; None leaves the id out."""

    def __init__(self, runs: Sequence[object], backend_id: str = "scripted") -> None:
        self._runs = list(runs)
        self._backend_id = backend_id
        self.calls = 0

    @property
    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(
            backend_id=self._backend_id, kind="scripted", deterministic=True
        )

    def measure(
        self,
        requests: Sequence[Tuple[str, ArchConfig]],
        *,
        runs_per_arch: int,
        batch_id: str,
        seed: int,
    ) -> Dict[str, Sequence[float]]:
        self.calls += 1
        out: Dict[str, Sequence[float]] = {}
        for (arch_id, _), runs in zip(requests, self._runs):
            if runs is not None:
                out[arch_id] = runs  # type: ignore[assignment]
        return out


class TestAggregate(unittest.TestCase):
    def test_trimmed_mean_of_one_to_150(self) -> None:
        self.assertEqual(aggregate_latency([float(i) for i in range(1, 151)]), 75.5)

    def test_five_runs_trim_one_each_side(self) -> None:
        self.assertEqual(aggregate_latency([1, 2, 3, 4, 100]), 3.0)

    def test_order_does_not_matter(self) -> None:
        runs = [float(i) for i in range(1, 151)]
        rnd = random.Random(0)
        for _ in range(1000):
            rnd.shuffle(runs)
            self.assertEqual(aggregate_latency(runs), 75.5)

    def test_too_few_runs(self) -> None:
        with self.assertRaises(AggregationError):
            aggregate_latency([1.0, 2.0, 3.0, 4.0])


class TestOracle(unittest.TestCase):
    def setUp(self) -> None:
        self.spec = load_spec("resnet")
        self.params = OracleParams()

    def test_smallest_resnet_by_hand(self) -> None:
        arch = _resnet_arch([1, 1, 1, 1], [[0], [0], [0], [0]])
        self.assertAlmostEqual(oracle_mean(self.spec, arch, self.params), 1.32, places=12)

    def test_kernel_transitions_count_within_units(self) -> None:
        a = _resnet_arch([3, 1, 1, 1], [[0, 1, 0], [0], [0], [0]])
        b = _resnet_arch([3, 1, 1, 1], [[0, 0, 1], [0], [0], [0]])
        self.assertEqual(kernel_transitions(self.spec, a), 2)
        self.assertEqual(kernel_transitions(self.spec, b), 1)
        self.assertAlmostEqual(
            oracle_mean(self.spec, a, self.params) - oracle_mean(self.spec, b, self.params),
            self.params.alpha,
            places=12,
        )

    def test_zero_sigma_is_exact(self) -> None:
        params = OracleParams(sigma=0.0)
        arch = sample_random(self.spec, 1, seed=3)[0]
        runs = oracle_latency(self.spec, arch, params, seed=9, runs=150)
        self.assertEqual(len(runs), 150)
        self.assertEqual(set(runs), {oracle_mean(self.spec, arch, params)})

    def test_noise_is_seeded(self) -> None:
        arch = sample_random(self.spec, 1, seed=3)[0]
        a = oracle_latency(self.spec, arch, self.params, seed=1)
        self.assertEqual(a, oracle_latency(self.spec, arch, self.params, seed=1))
        self.assertNotEqual(a, oracle_latency(self.spec, arch, self.params, seed=2))
        self.assertTrue(all(r > 0 for r in a))

    def test_wave_step(self) -> None:
        params = OracleParams(a1=0.0, a2=0.0, alpha=0.0, gamma=1.0, rho=4)
        four = _resnet_arch([1, 1, 1, 1], [[0], [0], [0], [0]])
        five = _resnet_arch([2, 1, 1, 1], [[0, 0], [0], [0], [0]])
        self.assertEqual(oracle_mean(self.spec, four, params), 1.0)
        self.assertEqual(oracle_mean(self.spec, five, params), 2.0)

    def test_appending_a_block_always_costs_more(self) -> None:
        rnd = random.Random(11)
        grown_count = 0
        for arch in sample_random(self.spec, 2000, seed=12):
            before = oracle_mean(self.spec, arch, self.params)
            for u, depth in enumerate(arch.unit_depths):
                if depth >= self.spec.units[u].max_depth:
                    continue
                block = (rnd.randrange(3), rnd.randrange(3))
                depths = list(arch.unit_depths)
                depths[u] += 1
                blocks = list(arch.block_features)
                blocks[u] = blocks[u] + (block,)
                grown = ArchConfig(
                    spec_name=arch.spec_name,
                    unit_depths=tuple(depths),
                    block_features=tuple(blocks),
                    unit_features=arch.unit_features,
                )
                self.assertGreater(oracle_mean(self.spec, grown, self.params), before)
                grown_count += 1
        self.assertGreater(grown_count, 1000)


class TestReferences(unittest.TestCase):
    def test_positions_are_spread(self) -> None:
        self.assertEqual(reference_positions(100, 5), [16, 34, 51, 69, 87])

    def test_inject_keeps_order_and_adds_each_ref_once(self) -> None:
        spec = load_spec("resnet")
        batch = sample_random(spec, 100, seed=0)
        refs = sample_random(spec, 5, seed=1)
        merged = inject_references(batch, refs)
        self.assertEqual(len(merged), 105)
        self.assertEqual([a for a in merged if a not in refs], batch)
        self.assertEqual([merged[p] for p in reference_positions(100, 5)], refs)
        self.assertEqual(inject_references(batch, []), batch)


class TestMeasureBatch(unittest.TestCase):
    def setUp(self) -> None:
        self.spec = load_spec("resnet")
        self.archs = sample_random(self.spec, 4, seed=2)

    def test_oracle_batch(self) -> None:
        backend = OracleBackend(self.spec, OracleParams(sigma=0.0))
        result = measure_batch(backend, self.archs, runs_per_arch=20, batch_id="b1")
        self.assertEqual(result.batch_id, "b1")
        self.assertEqual(result.failed, ())
        self.assertEqual(
            [m.arch_id for m in result.measured], [f"b1-{i:05d}" for i in range(4)]
        )
        for m, arch in zip(result.measured, self.archs):
            self.assertAlmostEqual(
                m.latency_ms, oracle_mean(self.spec, arch, backend.params), places=12
            )
            self.assertEqual(len(m.raw.runs), 20)
            self.assertEqual(m.raw.backend_id, "oracle")

    def test_same_seed_same_latencies(self) -> None:
        backend = OracleBackend(self.spec)
        a = measure_batch(backend, self.archs, seed=5)
        b = measure_batch(backend, self.archs, seed=5)
        self.assertEqual([m.latency_ms for m in a.measured], [m.latency_ms for m in b.measured])

    def test_invalid_runs_become_failures(self) -> None:
        good = [1.0] * 5
        backend = _ScriptedBackend(
            [good, None, [1.0, float("nan"), 1.0, 1.0, 1.0], [1.0] * 4, [-1.0] * 5]
        )
        archs = sample_random(self.spec, 5, seed=0)
        result = measure_batch(backend, archs, runs_per_arch=5, batch_id="x")
        self.assertEqual(len(result.measured), 1)
        self.assertEqual(result.failed_ids(), ["x-00001", "x-00002", "x-00003", "x-00004"])
        self.assertAlmostEqual(failure_rate(result), 0.8)

    def test_rejects_too_few_runs_and_bad_ids(self) -> None:
        backend = _ScriptedBackend([])
        with self.assertRaises(ValueError):
            measure_batch(backend, self.archs, runs_per_arch=4)
        with self.assertRaises(ValueError):
            measure_batch(backend, self.archs, runs_per_arch=5, arch_ids=["a"] * 4)
        self.assertEqual(backend.calls, 0)

    def test_drift_scales_one_batch(self) -> None:
        backend = OracleBackend(
            self.spec, OracleParams(sigma=0.0), drift={"hot": 1.1}
        )
        cold = measure_batch(backend, self.archs, runs_per_arch=5, batch_id="cold")
        hot = measure_batch(backend, self.archs, runs_per_arch=5, batch_id="hot")
        for c, h in zip(cold.measured, hot.measured):
            self.assertAlmostEqual(h.latency_ms / c.latency_ms, 1.1, places=12)


if __name__ == "__main__":
    unittest.main()
