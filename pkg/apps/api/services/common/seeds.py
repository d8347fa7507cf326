from __future__ import annotations

import zlib

import numpy as np


def derive_seed(root: int, *names: str | int) -> int:
    """
    Named substream of a root seed.

    The same (root, names) always yields the same 63-bit seed, so every
    random consumer (sampling, oracle, training, splits) can be replayed from
    the single root seed recorded in a run manifest.
    """
    words = [int(root) & 0xFFFFFFFF, (int(root) >> 32) & 0xFFFFFFFF]
    for name in names:
        if isinstance(name, int):
            words.append(name & 0xFFFFFFFF)
        else:
            words.append(zlib.crc32(str(name).encode("utf-8")))
    state = np.random.SeedSequence(words).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


def rng_for(root: int, *names: str | int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root, *names))
