"""Variate generators built on a seedable uniform/normal stream.

Gamma variates use the Marsaglia-Tsang squeeze on a cubed normal
proposal; exponentials use the inverse CDF. Everything runs on a
``numpy.random.Generator`` so a fixed seed reproduces bit-identical draws.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def spawn(seed, count: int) -> list[np.random.Generator]:
    """Independent child streams derived deterministically from ``seed``."""
    if isinstance(seed, np.random.Generator):
        seq = seed.bit_generator.seed_seq
    elif isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(seed)
    return [make_rng(child) for child in seq.spawn(count)]


def standard_exponential(rng: np.random.Generator, size) -> np.ndarray:
    u = rng.random(size)
    return -np.log1p(-u)


def standard_gamma(rng: np.random.Generator, shape: float, size) -> np.ndarray:
    """Gamma(shape, 1) variates by Marsaglia-Tsang rejection."""
    if shape <= 0:
        raise ValueError("gamma shape must be positive")
    if shape < 1.0:
        # boost: G(a) = G(a+1) * U^(1/a)
        g = standard_gamma(rng, shape + 1.0, size)
        return g * rng.random(size) ** (1.0 / shape)

    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(int(np.prod(size)), dtype=float)
    pending = np.arange(out.size)
    while pending.size:
        k = pending.size
        x = rng.standard_normal(k)
        u = rng.random(k)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            logv = np.where(ok, np.log(np.where(ok, v, 1.0)), -np.inf)
            squeeze = u < 1.0 - 0.0331 * x**4
            full = np.log(u) < 0.5 * x**2 + d * (1.0 - v + logv)
        accept = ok & (squeeze | full)
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]
    return out.reshape(size)


def beta(rng: np.random.Generator, a: float, b: float, size) -> np.ndarray:
    ga = standard_gamma(rng, a, size)
    gb = standard_gamma(rng, b, size)
    return ga / (ga + gb)
