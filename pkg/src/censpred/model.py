"""Type-II censored exponential samples and the exact laws of future spacings.

Lifetimes are iid with density ``theta * exp(-theta t)``; only the first m
of n order statistics are observed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from . import _random
from .exceptions import DomainError

__all__ = [
    "CensoredSample",
    "PairTarget",
    "NextNTarget",
    "sufficient_statistic",
    "model_density_pair",
    "model_density_next_n",
    "model_spacing_rates",
    "simulate_experiment",
    "simulate_experiments",
    "sufficient_statistics",
]


@dataclass(frozen=True)
class CensoredSample:
    """The first ``m`` order statistics out of ``n`` lifetimes."""

    n: int
    m: int
    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) == 0:
            raise DomainError("sample is empty")
        if not 1 <= self.m < self.n:
            raise DomainError(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        if len(values) != self.m:
            raise DomainError(f"expected {self.m} values, got {len(values)}")
        if any(not v > 0 for v in values):
            raise DomainError("order statistics must be strictly positive")
        if any(b < a for a, b in zip(values, values[1:])):
            raise DomainError("values must be sorted in nondecreasing order")

    @property
    def last(self) -> float:
        """The largest observed value x_{m:n}."""
        return self.values[-1]


@dataclass(frozen=True)
class PairTarget:
    """Predict (X_{r:n}, X_{s:n}) through Y1 = X_r - X_m, Y2 = X_s - X_r."""

    r: int
    s: int

    def validate(self, n: int, m: int) -> None:
        if not m < self.r < self.s <= n:
            raise DomainError(f"need m < r < s <= n, got m={m}, r={self.r}, s={self.s}, n={n}")

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class NextNTarget:
    """Predict the next N spacings Z_i = X_{m+i:n} - X_{m+i-1:n}."""

    N: int

    def validate(self, n: int, m: int) -> None:
        if not 1 <= self.N <= n - m:
            raise DomainError(f"need 1 <= N <= n - m, got N={self.N}, n - m={n - m}")

    @property
    def dim(self) -> int:
        return self.N


def sufficient_statistic(sample: CensoredSample) -> float:
    """Total time on test, ``sum(x_i) + (n - m) * x_m``."""
    return math.fsum(sample.values) + (sample.n - sample.m) * sample.last


def _check_nm(n: int, m: int) -> None:
    if not 1 <= m < n:
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")


def model_spacing_rates(n: int, m: int, N: int) -> np.ndarray:
    """Rate multipliers ``n - m - i + 1`` (i = 1..N) of theta for the spacings."""
    _check_nm(n, m)
    NextNTarget(N).validate(n, m)
    return np.arange(n - m, n - m - N, -1, dtype=float)


def _log_pair_const(n: int, m: int, r: int, s: int) -> float:
    return float(gammaln(n - m + 1) - gammaln(r - m) - gammaln(s - r) - gammaln(n - s + 1))


def model_density_pair(n: int, m: int, r: int, s: int, theta: float, y):
    """Joint density of (Y1, Y2) for fixed theta: ``theta**2 q1(theta y1, theta y2)``."""
    _check_nm(n, m)
    PairTarget(r, s).validate(n, m)
    if not theta > 0:
        raise DomainError("theta must be positive")
    y = np.asarray(y, dtype=float)
    if y.shape[-1:] != (2,):
        raise DomainError("y must have a trailing dimension of 2")
    if np.any(y < 0):
        raise DomainError("y must be nonnegative")
    u1 = theta * y[..., 0]
    u2 = theta * y[..., 1]
    with np.errstate(divide="ignore"):
        logq = (
            _log_pair_const(n, m, r, s)
            + xlogy(r - m - 1, -np.expm1(-u1))
            + xlogy(s - r - 1, -np.expm1(-u2))
            - (n - r + 1) * u1
            - (n - s + 1) * u2
        )
    out = theta**2 * np.exp(logq)
    return float(out) if out.ndim == 0 else out


def model_density_next_n(n: int, m: int, N: int, theta: float, z):
    """Joint density of the next N spacings: independent Exp((n-m-i+1) theta)."""
    if not theta > 0:
        raise DomainError("theta must be positive")
    rates = theta * model_spacing_rates(n, m, N)
    z = np.asarray(z, dtype=float)
    if z.shape[-1:] != (N,):
        raise DomainError(f"z must have a trailing dimension of {N}")
    if np.any(z < 0):
        raise DomainError("z must be nonnegative")
    out = np.exp(np.log(rates).sum() - z @ rates)
    return float(out) if out.ndim == 0 else out


def simulate_experiments(n: int, m: int, theta: float, rng: np.random.Generator, trials: int):
    """Vectorized simulator: ``trials`` full samples of n iid Exp(theta).

    Returns ``(observed, future)`` with shapes (trials, m) and (trials, n-m),
    each row sorted ascending.
    """
    _check_nm(n, m)
    if not theta > 0:
        raise DomainError("theta must be positive")
    draws = _random.standard_exponential(rng, (trials, n)) / theta
    draws.sort(axis=1)
    return draws[:, :m], draws[:, m:]


def simulate_experiment(n: int, m: int, theta: float, rng: np.random.Generator):
    """Draw one censored sample plus its unobserved future order statistics."""
    observed, future = simulate_experiments(n, m, theta, rng, 1)
    return CensoredSample(n, m, tuple(observed[0])), future[0]


def sufficient_statistics(observed: np.ndarray, n: int) -> np.ndarray:
    """Row-wise total time on test for an array of sorted observed samples."""
    m = observed.shape[-1]
    return observed.sum(axis=-1) + (n - m) * observed[..., -1]


def murthy_path():
    """Path-like handle to the bundled 30 failure times (hours)."""
    from importlib import resources

    return resources.files("censpred") / "data" / "murthy.csv"


def murthy_lifetimes() -> tuple[float, ...]:
    """The bundled 30 failure times, ascending."""
    text = murthy_path().read_text()
    return tuple(sorted(float(t) for t in text.replace(",", " ").split()))
