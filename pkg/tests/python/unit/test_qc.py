from __future__ import annotations

import unittest

from services.measurement import QcError, RefReading, qc_check


def _history(*series: list[tuple[str, float]]) -> dict[str, list[RefReading]]:
    return {
        f"ref-{i}": [RefReading(batch_id=b, latency_ms=v) for b, v in readings]
        for i, readings in enumerate(series)
    }


class TestQcCheck(unittest.TestCase):
    def test_five_percent_jump_is_flagged(self) -> None:
        report = qc_check(_history([("b0", 10.0), ("b1", 10.5)]), threshold=0.03)
        self.assertFalse(report.passed)
        self.assertEqual(report.outlier_batches, ("b1",))
        self.assertAlmostEqual(report.max_deviation(), 0.05)

    def test_small_drift_passes(self) -> None:
        report = qc_check(_history([("b0", 10.0), ("b1", 10.3)]), threshold=0.03)
        self.assertTrue(report.passed)
        self.assertEqual(report.outlier_batches, ())

    def test_threshold_is_inclusive(self) -> None:
        report = qc_check(
            _history([("b0", 100.0), ("b1", 103.0)], [("b0", 50.0), ("b1", 48.5)]),
            threshold=0.03,
        )
        self.assertTrue(report.passed)

    def test_flagged_readings_leave_the_baseline_alone(self) -> None:
        report = qc_check(
            _history([("b0", 10.0), ("b1", 20.0), ("b2", 10.1)]), threshold=0.03
        )
        self.assertEqual(report.outlier_batches, ("b1",))
        self.assertAlmostEqual(report.deviations["ref-0"][2][1], 0.01)

    def test_offset_first_batch_is_the_outlier(self) -> None:
        report = qc_check(
            _history([("b0", 11.0), ("b1", 10.0), ("b2", 10.0)]), threshold=0.03
        )
        self.assertEqual(report.outlier_batches, ("b0",))
        self.assertAlmostEqual(report.deviations["ref-0"][0][1], 0.1)
        self.assertEqual(report.deviations["ref-0"][1][1], 0.0)

    def test_two_readings_tie_goes_to_the_earlier_one(self) -> None:
        report = qc_check(_history([("b0", 11.0), ("b1", 10.0)]), threshold=0.03)
        self.assertEqual(report.outlier_batches, ("b1",))

    def test_witnesses_break_a_tie(self) -> None:
        report = qc_check(
            _history([("b0", 11.0), ("b1-r1", 10.0)]),
            threshold=0.03,
            witnesses={"ref-0": [10.0]},
        )
        self.assertEqual(report.outlier_batches, ("b0",))

    def test_threshold_one_accepts_doubling(self) -> None:
        self.assertTrue(qc_check(_history([("b0", 1.0), ("b1", 2.0)]), threshold=1.0).passed)

    def test_threshold_zero_needs_identical_readings(self) -> None:
        self.assertTrue(qc_check(_history([("b0", 1.0), ("b1", 1.0)]), threshold=0.0).passed)
        self.assertFalse(
            qc_check(_history([("b0", 1.0), ("b1", 1.001)]), threshold=0.0).passed
        )

    def test_batches_are_reported_once(self) -> None:
        report = qc_check(
            _history([("b0", 10.0), ("b1", 11.0)], [("b0", 5.0), ("b1", 6.0)])
        )
        self.assertEqual(report.outlier_batches, ("b1",))

    def test_missing_history(self) -> None:
        with self.assertRaises(QcError):
            qc_check({})
        with self.assertRaises(QcError):
            qc_check(_history([("b0", 10.0)]))
        with self.assertRaises(ValueError):
            qc_check(_history([("b0", 1.0), ("b1", 1.0)]), threshold=-0.1)


if __name__ == "__main__":
    unittest.main()
