from __future__ import annotations

import json
import unittest
from collections import Counter
from pathlib import Path
from tempfile import TemporaryDirectory

from services.archspace import bin_index, load_spec, make_bins, sample_balanced, total_depth
from services.dataset import (
    DatasetChecksumError,
    DatasetError,
    DatasetSchemaError,
    DatasetVersionError,
    LatencyDataset,
    Sample,
    dump_records,
    encoded_matrix,
    load_dataset,
    partition_by_bin,
    reference_history,
    save_dataset,
    split,
    training_samples,
    with_encodings,
    with_samples,
    with_scheme,
)


def _dataset(n: int, *, n_refs: int = 2, seed: int = 0) -> LatencyDataset:
    spec = load_spec("resnet")
    bins = make_bins(spec, 4)
    archs = sample_balanced(spec, n, bins, seed)
    refs = tuple(sample_balanced(spec, 4, bins, seed + 1)[:n_refs])
    samples = [
        Sample(
            sample_id=f"b0-{i:05d}",
            arch=a,
            latency_ms=1.0 + total_depth(a) * 0.25,
            batch_id="b0",
        )
        for i, a in enumerate(archs)
    ]
    for j, ref in enumerate(refs):
        for batch in ("b0", "b1"):
            samples.append(
                Sample(
                    sample_id=f"{batch}-ref{j}",
                    arch=ref,
                    latency_ms=2.0 + j,
                    batch_id=batch,
                    is_reference=True,
                    ref_index=j,
                )
            )
    return LatencyDataset(
        spec=spec,
        scheme="fcc",
        bins=bins,
        samples=tuple(samples),
        refs=refs,
        seeds={"root": seed},
        backend={"backend_id": "oracle"},
    )


class TestDatasetModel(unittest.TestCase):
    def test_references_stay_out_of_training_samples(self) -> None:
        ds = _dataset(20)
        self.assertEqual(len(ds), 24)
        self.assertEqual(len(training_samples(ds)), 20)
        history = reference_history(ds.samples)
        self.assertEqual(sorted(history), ["ref-0", "ref-1"])
        self.assertEqual([r.batch_id for r in history["ref-0"]], ["b0", "b1"])

    def test_with_samples_bumps_version_and_rejects_duplicates(self) -> None:
        ds = _dataset(8)
        extra = Sample(sample_id="b2-00000", arch=ds.samples[0].arch, latency_ms=3.0, batch_id="b2")
        nxt = with_samples(ds, [extra])
        self.assertEqual(nxt.version, ds.version + 1)
        self.assertEqual(len(nxt), len(ds) + 1)
        self.assertEqual(len(ds.samples), 12)
        with self.assertRaises(DatasetError):
            with_samples(nxt, [extra])

    def test_sample_validation(self) -> None:
        arch = _dataset(4).samples[0].arch
        with self.assertRaises(DatasetError):
            Sample(sample_id="x", arch=arch, latency_ms=0.0, batch_id="b")
        with self.assertRaises(DatasetError):
            Sample(sample_id="x", arch=arch, latency_ms=1.0, batch_id="b", is_reference=True)

    def test_encodings_follow_the_scheme(self) -> None:
        ds = with_encodings(_dataset(8))
        self.assertTrue(all(len(s.encoded or ()) == 36 for s in ds.samples))
        other = with_scheme(ds, "statistical")
        self.assertTrue(all(s.encoded is None for s in other.samples))
        self.assertIs(with_scheme(ds, "fcc"), ds)

    def test_encoded_matrix_uses_cache_or_encodes(self) -> None:
        raw = _dataset(8)
        cached = with_encodings(raw)
        fresh = encoded_matrix(raw, training_samples(raw))
        self.assertEqual(fresh.shape, (len(training_samples(raw)), 36))
        self.assertEqual(fresh.tolist(), encoded_matrix(cached, training_samples(cached)).tolist())
        self.assertEqual(encoded_matrix(raw, []).shape, (0, 36))


class TestPersistence(unittest.TestCase):
    def test_round_trip(self) -> None:
        ds = with_encodings(_dataset(16))
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "dataset.jsonl"
            save_dataset(ds, path)
            loaded = load_dataset(path)
        self.assertEqual(loaded, ds)

    def test_truncated_file_fails_checksum(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "dataset.jsonl"
            save_dataset(_dataset(8), path)
            lines = path.read_text(encoding="utf-8").splitlines()
            path.write_text("\n".join(lines[:-2]) + "\n", encoding="utf-8")
            with self.assertRaises(DatasetChecksumError):
                load_dataset(path)

    def test_edited_record_fails_checksum(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "dataset.jsonl"
            save_dataset(_dataset(8), path)
            text = path.read_text(encoding="utf-8").replace('"b0-00001"', '"b9-00001"')
            path.write_text(text, encoding="utf-8")
            with self.assertRaises(DatasetChecksumError):
                load_dataset(path)

    def _rewrite_header(self, path: Path, **changes: object) -> None:
        lines = path.read_text(encoding="utf-8").splitlines()
        header = json.loads(lines[0])
        header.update(changes)
        body = [json.loads(ln) for ln in lines[1:-1]]
        path.write_text(dump_records(header, body), encoding="utf-8")

    def test_newer_format_version(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "dataset.jsonl"
            save_dataset(_dataset(8), path)
            self._rewrite_header(path, format_version=2)
            with self.assertRaises(DatasetVersionError):
                load_dataset(path)

    def test_unknown_scheme_tag(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "dataset.jsonl"
            save_dataset(_dataset(8), path)
            self._rewrite_header(path, scheme="binary")
            with self.assertRaises(DatasetSchemaError):
                load_dataset(path)

    def test_architecture_outside_the_header_spec(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "dataset.jsonl"
            save_dataset(_dataset(8), path)
            lines = path.read_text(encoding="utf-8").splitlines()
            header = json.loads(lines[0])
            body = [json.loads(ln) for ln in lines[1:-1]]
            body[0]["arch"]["unit_depths"][0] = 9
            body[0]["arch"]["block_features"][0] = [[0, 0]] * 9
            path.write_text(dump_records(header, body), encoding="utf-8")
            with self.assertRaises(DatasetSchemaError) as ctx:
                load_dataset(path)
        self.assertIn("sample b0-00000", str(ctx.exception))

    def test_missing_file(self) -> None:
        with TemporaryDirectory() as tmp:
            with self.assertRaises(DatasetError):
                load_dataset(Path(tmp) / "nope.jsonl")


class TestSplit(unittest.TestCase):
    def test_stratified_two_to_one(self) -> None:
        ds = _dataset(12000)
        train, test = split(ds, 1 / 3, seed=4)
        self.assertEqual(len(train), 8000)
        self.assertEqual(len(test), 4000)
        self.assertFalse(any(s.is_reference for s in train.samples + test.samples))
        ids_train = {s.sample_id for s in train.samples}
        ids_test = {s.sample_id for s in test.samples}
        self.assertFalse(ids_train & ids_test)
        per_bin = Counter(bin_index(s.arch, ds.bins) for s in test.samples)
        for b in range(4):
            self.assertLessEqual(abs(per_bin[b] - 1000), 1)

    def test_split_is_seeded(self) -> None:
        ds = _dataset(200)
        a = split(ds, 0.25, seed=1)[1]
        b = split(ds, 0.25, seed=1)[1]
        c = split(ds, 0.25, seed=2)[1]
        self.assertEqual([s.sample_id for s in a.samples], [s.sample_id for s in b.samples])
        self.assertNotEqual(
            [s.sample_id for s in a.samples], [s.sample_id for s in c.samples]
        )

    def test_partition_and_bad_fraction(self) -> None:
        ds = _dataset(40)
        groups = partition_by_bin(ds)
        self.assertEqual({b: len(m) for b, m in groups.items()}, {0: 10, 1: 10, 2: 10, 3: 10})
        with self.assertRaises(ValueError):
            split(ds, 1.0, seed=0)


if __name__ == "__main__":
    unittest.main()
