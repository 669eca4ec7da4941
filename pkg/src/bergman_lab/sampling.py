"""Deterministic sample streams for suites and the CLI.

All randomness flows through numpy's Philox bit generator (counter-based),
keyed by ``SeedSequence([seed, *stream])``.  A given (seed, stream) pair
therefore reproduces the same points and directions on every platform and
in any execution order; suite cases index their own stream so they can be
evaluated independently.

Direction vectors are uniform on the unit sphere of C^n: 2n independent
standard normals read as n complex entries, then normalised.
"""
from __future__ import annotations

import numpy as np

from .core import DomainSpec


def generator(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for the given seed and stream indices."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform direction on the unit sphere of C^n."""
    while True:
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def direction_pair(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    return unit_vector(rng, n), unit_vector(rng, n)


def interior_point(rng: np.random.Generator, domain: DomainSpec,
                   max_gauge: float) -> np.ndarray:
    """A point with gauge uniformly-in-volume distributed in (0, max_gauge]."""
    n = domain.dimension
    w = unit_vector(rng, n)
    target = max_gauge * rng.uniform() ** (1.0 / (2 * n))
    return w * (target / domain.gauge(w))
