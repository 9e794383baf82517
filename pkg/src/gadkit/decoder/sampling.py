"""
Sampling kernel: a counter-based RNG and the categorical draw shared by all
decoders.
"""

from typing import Sequence

import numpy as np


class AllZeroWeightsError(ValueError):
    """Exception raised when a categorical draw has no positive weight."""
    pass


class CounterRNG:
    """
    Deterministic uniforms keyed by (seed, iteration, step, attempt).

    Each draw builds a Philox generator whose key is the seed and whose
    counter is the draw's coordinates, then takes one 64-bit uniform. No state
    is carried between draws, so saved and resumed runs replay identically.
    """

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2 ** 64:
            raise ValueError(f"Seed must be in [0, 2^64), got {seed}")
        self.seed = int(seed)

    def uniform(self, iteration: int, step: int, attempt: int = 0) -> float:
        counter = np.array([step, iteration, attempt, 0], dtype=np.uint64)
        generator = np.random.Generator(np.random.Philox(key=self.seed, counter=counter))
        return float(generator.random())


def ancestral_step(weights: Sequence[float], u: float) -> int:
    """
    Categorical draw proportional to non-negative weights from one uniform u in [0, 1).

    Raises:
        AllZeroWeightsError: no weight is positive
        ValueError: negative or NaN weights
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("Weights must be a non-empty vector")
    if np.isnan(w).any() or (w < 0).any() or np.isinf(w).any():
        raise ValueError("Weights must be finite and non-negative")
    positive = np.flatnonzero(w > 0)
    if positive.size == 0:
        raise AllZeroWeightsError("All weights are zero")

    cumulative = np.cumsum(w)
    index = int(np.searchsorted(cumulative, u * cumulative[-1], side="right"))
    # u * total can round up to the total
    return min(index, int(positive[-1]))
