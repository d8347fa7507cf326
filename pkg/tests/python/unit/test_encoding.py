from __future__ import annotations

import itertools
import random
import unittest
from typing import Dict, List, Sequence, Tuple

import numpy as np

from services.archspace import ArchConfig, load_spec, sample_random, spec_from_mapping
from services.encoding import (
    SCHEMES,
    EncodingError,
    combination_index,
    combination_options,
    decode_one_hot,
    encode,
    encode_fcc,
    encode_feature_count,
    encode_many,
    encode_one_hot,
    encode_statistical,
    encoding_length,
    parse_scheme,
)


def _hand_arch() -> ArchConfig:
    return ArchConfig(
        spec_name="resnet",
        unit_depths=(2, 1, 1, 1),
        block_features=(((0, 0), (2, 1)), ((1, 2),), ((0, 0),), ((0, 0),)),
        unit_features=((), (), (), ()),
    )


class TestSchemeNames(unittest.TestCase):
    def test_aliases(self) -> None:
        self.assertEqual(parse_scheme("FC"), "feature_count")
        self.assertEqual(parse_scheme(" one-hot "), "one_hot")
        self.assertEqual(parse_scheme("stat"), "statistical")
        self.assertEqual(parse_scheme("fcc"), "fcc")

    def test_unknown_scheme(self) -> None:
        with self.assertRaises(EncodingError):
            parse_scheme("binary")
        with self.assertRaises(EncodingError):
            encode(load_spec("resnet"), _hand_arch(), "binary")


class TestLengths(unittest.TestCase):
    def test_resnet_lengths(self) -> None:
        spec = load_spec("resnet")
        expected = {
            "fcc": 36,
            "feature_count": 24,
            "one_hot": 196,
            "statistical": 20,
            "feature": 56,
        }
        for scheme, n in expected.items():
            self.assertEqual(encoding_length(spec, scheme), n, scheme)
            self.assertEqual(len(encode(spec, _hand_arch(), scheme)), n, scheme)

    def test_lengths_do_not_depend_on_the_architecture(self) -> None:
        spec = load_spec("mobilenetv3")
        for scheme in SCHEMES:
            lengths = {len(encode(spec, a, scheme)) for a in sample_random(spec, 20, 1)}
            self.assertEqual(lengths, {encoding_length(spec, scheme)})

    def test_densenet_per_unit_kernel(self) -> None:
        spec = load_spec("densenet")
        arch = sample_random(spec, 1, seed=4)[0]
        vec = encode_fcc(spec, arch)
        self.assertEqual(len(vec), 25)
        for u in range(5):
            chunk = vec.values[u * 5 : (u + 1) * 5]
            self.assertEqual(sum(chunk), arch.unit_depths[u])
            self.assertEqual(chunk[arch.unit_features[u][0]], arch.unit_depths[u])


class TestHandExamples(unittest.TestCase):
    def setUp(self) -> None:
        self.spec = load_spec("resnet")
        self.arch = _hand_arch()

    def test_combination_index_is_kernel_major(self) -> None:
        self.assertEqual(combination_index(self.spec, (0, 0)), 0)
        self.assertEqual(combination_index(self.spec, (2, 1)), 7)
        self.assertEqual(combination_index(self.spec, (1, 2)), 5)
        for combo in range(9):
            self.assertEqual(
                combination_index(self.spec, combination_options(self.spec, combo)),
                combo,
            )

    def test_fcc(self) -> None:
        values = encode_fcc(self.spec, self.arch).values
        unit0 = [0.0] * 9
        unit0[0] = 1.0
        unit0[7] = 1.0
        self.assertEqual(list(values[:9]), unit0)
        self.assertEqual(values[9 + 5], 1.0)
        self.assertEqual(sum(values[9:18]), 1.0)

    def test_feature_count(self) -> None:
        values = encode_feature_count(self.spec, self.arch).values
        self.assertEqual(list(values[:6]), [1.0, 0.0, 1.0, 1.0, 1.0, 0.0])

    def test_statistical(self) -> None:
        values = encode_statistical(self.spec, self.arch).values
        self.assertEqual(values[0], 2.0)
        self.assertAlmostEqual(values[1], 5.0)
        self.assertAlmostEqual(values[2], 2.0)
        self.assertAlmostEqual(values[3], (0.5 + 2 / 3) / 2)
        self.assertAlmostEqual(values[4], (2 / 3 - 0.5) / 2)

    def test_feature_pads_missing_blocks(self) -> None:
        values = encode(self.spec, self.arch, "feature").values
        self.assertAlmostEqual(values[0], 3.0)
        self.assertAlmostEqual(values[1], 0.5)
        self.assertAlmostEqual(values[2], 7.0)
        self.assertAlmostEqual(values[3], 2 / 3)
        self.assertEqual(list(values[4:14]), [0.0] * 10)

    def test_one_hot_slots(self) -> None:
        values = encode_one_hot(self.spec, self.arch).values
        self.assertEqual(list(values[:7]), [1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0])
        self.assertEqual(list(values[7:14]), [1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0])
        self.assertEqual(list(values[14:49]), [0.0] * 35)


class TestEncodingProperties(unittest.TestCase):
    def setUp(self) -> None:
        self.spec = load_spec("resnet")
        self.archs = sample_random(self.spec, 100, seed=21)

    def test_fcc_marginals_give_feature_count(self) -> None:
        for arch in self.archs:
            fcc = np.array(encode_fcc(self.spec, arch).values).reshape(4, 3, 3)
            fc = np.array(encode_feature_count(self.spec, arch).values).reshape(4, 6)
            np.testing.assert_allclose(fcc.sum(axis=2), fc[:, :3])
            np.testing.assert_allclose(fcc.sum(axis=1), fc[:, 3:])
            np.testing.assert_allclose(fcc.sum(axis=(1, 2)), arch.unit_depths)

    def test_fcc_ignores_block_order(self) -> None:
        rnd = random.Random(0)
        for arch in self.archs:
            shuffled = []
            for blocks in arch.block_features:
                blocks = list(blocks)
                rnd.shuffle(blocks)
                shuffled.append(tuple(blocks))
            other = ArchConfig(
                spec_name=arch.spec_name,
                unit_depths=arch.unit_depths,
                block_features=tuple(shuffled),
                unit_features=arch.unit_features,
            )
            self.assertEqual(
                encode_fcc(self.spec, arch).values, encode_fcc(self.spec, other).values
            )

    def test_one_hot_round_trip(self) -> None:
        for arch in self.archs:
            self.assertEqual(
                decode_one_hot(self.spec, encode_one_hot(self.spec, arch).values), arch
            )

    def test_decode_rejects_malformed_vectors(self) -> None:
        values = list(encode_one_hot(self.spec, self.archs[0]).values)
        with self.assertRaises(EncodingError):
            decode_one_hot(self.spec, values[:-1])
        broken = list(values)
        broken[1] = 1.0
        broken[2] = 1.0
        broken[3] = 1.0
        with self.assertRaises(EncodingError):
            decode_one_hot(self.spec, broken)

    def test_encode_many_matches_single_encodes(self) -> None:
        for scheme in SCHEMES:
            matrix = encode_many(self.spec, self.archs[:10], scheme)
            self.assertEqual(matrix.shape, (10, encoding_length(self.spec, scheme)))
            np.testing.assert_array_equal(
                matrix[3], np.array(encode(self.spec, self.archs[3], scheme).values)
            )
        self.assertEqual(encode_many(self.spec, [], "fcc").shape, (0, 36))

    def test_architecture_from_another_spec(self) -> None:
        other = sample_random(load_spec("mobilenetv3"), 1, seed=0)[0]
        with self.assertRaises(EncodingError):
            encode_fcc(self.spec, other)


def _shuffled(arch: ArchConfig, rnd: random.Random) -> ArchConfig:
    blocks = []
    for unit in arch.block_features:
        unit = list(unit)
        rnd.shuffle(unit)
        blocks.append(tuple(unit))
    return ArchConfig(
        spec_name=arch.spec_name,
        unit_depths=arch.unit_depths,
        block_features=tuple(blocks),
        unit_features=arch.unit_features,
    )


class TestEncodingAlgebraAtScale(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.spec = load_spec("resnet")
        cls.archs = sample_random(cls.spec, 10_000, seed=33)

    def test_count_schemes_ignore_order_and_positional_schemes_do_not(self) -> None:
        rnd = random.Random(5)
        reordered = 0
        for arch in self.archs:
            other = _shuffled(arch, rnd)
            for scheme in ("fcc", "feature_count"):
                self.assertEqual(
                    encode(self.spec, arch, scheme).values,
                    encode(self.spec, other, scheme).values,
                    scheme,
                )
            np.testing.assert_allclose(
                encode_statistical(self.spec, arch).values,
                encode_statistical(self.spec, other).values,
                rtol=1e-12,
                atol=1e-12,
            )
            if other.block_features == arch.block_features:
                continue
            reordered += 1
            for scheme in ("feature", "one_hot"):
                self.assertNotEqual(
                    encode(self.spec, arch, scheme).values,
                    encode(self.spec, other, scheme).values,
                    scheme,
                )
        self.assertGreater(reordered, 5000)


class TestFccInjectivity(unittest.TestCase):
    def test_distinct_block_multisets_give_distinct_vectors(self) -> None:
        spec = spec_from_mapping(
            {
                "name": "tiny",
                "units": [{"depth_options": [1, 2]}, {"depth_options": [1, 2, 3]}],
                "features": [
                    {"name": "kernel_size", "options": [3, 5]},
                    {"name": "expansion_ratio", "options": ["1/2", 1]},
                ],
            }
        )
        combos = [combination_options(spec, c) for c in range(spec.block_combinations)]

        def unit_choices(depths: Sequence[int]) -> List[Tuple[Tuple[int, ...], ...]]:
            return [seq for d in depths for seq in itertools.product(combos, repeat=d)]

        by_key: Dict[Tuple[object, ...], Tuple[float, ...]] = {}
        for first in unit_choices(spec.units[0].depth_options):
            for second in unit_choices(spec.units[1].depth_options):
                arch = ArchConfig(
                    spec_name="tiny",
                    unit_depths=(len(first), len(second)),
                    block_features=(first, second),
                    unit_features=((), ()),
                )
                key = (tuple(sorted(first)), tuple(sorted(second)))
                vec = encode_fcc(spec, arch).values
                self.assertEqual(by_key.setdefault(key, vec), vec)
        # 14 multisets for the first unit, 34 for the second.
        self.assertEqual(len(by_key), 14 * 34)
        self.assertEqual(len(set(by_key.values())), len(by_key))


if __name__ == "__main__":
    unittest.main()
