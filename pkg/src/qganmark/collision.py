"""Probability that two users independently pick the same training-hardware
sequence from a suite of n backends.

A single-hardware pick collides with probability 1/n. For sequences of
length k > 1 the published closed form is prod_{i=1..k} 1/(n-i); note it
does not reduce to 1/n at k=1 (it gives 1/(n-1)), so the single-hardware
case is special-cased to match the worked value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class CollisionQuery:
    n: int  # suite size
    k: int  # sequence length

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("suite size n must be positive")
        if not 0 <= self.k < self.n:
            raise ConfigError(f"sequence length k={self.k} must satisfy 0 <= k < n={self.n}")


def collision_probability(query: CollisionQuery) -> float:
    if query.k == 0:
        return 1.0
    if query.k == 1:
        return 1.0 / query.n
    return 1.0 / math.prod(query.n - i for i in range(1, query.k + 1))
