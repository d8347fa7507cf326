from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .config import EsmError


@dataclass(frozen=True)
class Allocation:
    per_bin: Tuple[int, ...] = ()
    n_random: int = 0

    @property
    def total(self) -> int:
        return sum(self.per_bin) + self.n_random


def allocate_extension(
    bin_accs: Sequence[Optional[float]],
    acc_th: float,
    w1: float,
    w2: float,
    n_step: int,
    strategy: str = "balanced",
) -> Allocation:
    """
    Split the next extension step across depth bins.

    Bins below the threshold weigh w1, the rest w2; each bin receives
    ceil(n_step * w / (w1 * |below| + w2 * |above|)) samples. Bins without
    test samples (accuracy None) count as below. The random strategy skips
    the split and draws n_step samples from the whole space.
    """
    if w1 <= 0 or w2 <= 0:
        raise EsmError("weights must be > 0")
    if n_step < 1:
        raise EsmError("n_step must be >= 1")
    if strategy == "random":
        return Allocation(n_random=n_step)
    if not bin_accs or all(a is None for a in bin_accs):
        raise EsmError("no bin has accuracy data to allocate from")

    below = [a is None or a < acc_th for a in bin_accs]
    n_below = sum(below)
    norm = Fraction(w1) * n_below + Fraction(w2) * (len(bin_accs) - n_below)
    share_below = math.ceil(n_step * Fraction(w1) / norm)
    share_above = math.ceil(n_step * Fraction(w2) / norm)
    return Allocation(per_bin=tuple(share_below if b else share_above for b in below))
