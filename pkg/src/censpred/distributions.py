"""Pareto type II (univariate and multivariate) and Beta type II laws.

All densities are evaluated on the log scale and exponentiated at the end,
so large shape parameters do not overflow the rising factorial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaincc, gammaln

from . import _random
from ._numerics import bisect_increasing, expand_upper
from .exceptions import DomainError

__all__ = [
    "ParetoII",
    "MultiParetoII",
    "BetaTypeII",
    "beta2_cdf_shape2",
]


def _nonneg(t, name: str = "t") -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be nonnegative")
    return arr


def _scalar_or_array(arr: np.ndarray):
    return float(arr) if np.ndim(arr) == 0 else arr


def _probability(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("probability must lie strictly inside (0, 1)")
    return arr


@dataclass(frozen=True)
class ParetoII:
    """Pareto type II law with density ``l h / (1 + h t)**(l + 1)`` on t > 0.

    ``shape`` is l and ``rate`` is h (1/h is the scale, in time units).
    """

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise DomainError("ParetoII needs shape > 0 and rate > 0")

    def logpdf(self, t):
        t = _nonneg(t)
        out = np.log(self.shape) + np.log(self.rate) - (self.shape + 1.0) * np.log1p(self.rate * t)
        return _scalar_or_array(out)

    def pdf(self, t):
        return _scalar_or_array(np.exp(self.logpdf(t)))

    def sf(self, t):
        t = _nonneg(t)
        return _scalar_or_array(np.exp(-self.shape * np.log1p(self.rate * t)))

    def cdf(self, t):
        t = _nonneg(t)
        return _scalar_or_array(-np.expm1(-self.shape * np.log1p(self.rate * t)))

    def quantile(self, p):
        """Inverse CDF, ``((1 - p)**(-1/l) - 1) / h``."""
        p = _probability(p)
        out = np.expm1(-np.log1p(-p) / self.shape) / self.rate
        return _scalar_or_array(out)

    def mean(self) -> float:
        if self.shape <= 1:
            raise DomainError("ParetoII mean requires shape > 1")
        return 1.0 / (self.rate * (self.shape - 1.0))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return MultiParetoII(self.shape, (self.rate,)).sample(rng, count)[:, 0]


@dataclass(frozen=True)
class MultiParetoII:
    """N-variate Pareto type II law P2(m, h_1, ..., h_N).

    Density ``(m)_N prod(h) / (1 + sum(h z))**(m + N)`` on the positive
    orthant, where ``(m)_N = Gamma(m + N) / Gamma(m)``. Component indices
    are zero-based.
    """

    shape: float
    rates: tuple[float, ...]

    def __post_init__(self):
        rates = tuple(float(h) for h in np.atleast_1d(self.rates))
        object.__setattr__(self, "rates", rates)
        if not self.shape > 0:
            raise DomainError("MultiParetoII needs shape > 0")
        if len(rates) < 1 or any(not h > 0 for h in rates):
            raise DomainError("MultiParetoII needs N >= 1 positive rates")

    @property
    def dim(self) -> int:
        return len(self.rates)

    def _linear(self, z) -> np.ndarray:
        z = _nonneg(z, "z")
        if z.shape[-1:] != (self.dim,):
            raise DomainError(f"expected points of dimension {self.dim}, got shape {z.shape}")
        return z @ np.asarray(self.rates)

    def log_norm(self) -> float:
        """log of ``(m)_N * prod(h)``."""
        n = self.dim
        return float(gammaln(self.shape + n) - gammaln(self.shape) + np.log(self.rates).sum())

    def logpdf(self, z):
        s = self._linear(z)
        out = self.log_norm() - (self.shape + self.dim) * np.log1p(s)
        return _scalar_or_array(out)

    def pdf(self, z):
        return _scalar_or_array(np.exp(self.logpdf(z)))

    def survival(self, z):
        """Joint survival ``P(Z_i >= z_i for all i) = (1 + sum(h z))**(-m)``."""
        s = self._linear(z)
        return _scalar_or_array(np.exp(-self.shape * np.log1p(s)))

    def marginal(self, i: int) -> ParetoII:
        return ParetoII(self.shape, self.rates[i])

    def conditional(self, i: int, j: int, z_i: float) -> ParetoII:
        """Law of component j given component i equals ``z_i``."""
        if i == j:
            raise DomainError("conditional needs two distinct components")
        z_i = float(_nonneg(z_i, "z_i"))
        return ParetoII(self.shape + 1.0, self.rates[j] / (1.0 + self.rates[i] * z_i))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Rows ``(E_1/(h_1 G), ..., E_N/(h_N G))`` with E ~ Exp(1), G ~ Gamma(m, 1)."""
        if count < 1:
            raise DomainError("count must be >= 1")
        e = _random.standard_exponential(rng, (count, self.dim))
        g = _random.standard_gamma(rng, self.shape, count)
        return e / (np.asarray(self.rates) * g[:, None])


@dataclass(frozen=True)
class BetaTypeII:
    """Beta type II (beta prime) law B2(a, b): density proportional to
    ``w**(a-1) / (1+w)**(a+b)`` on w > 0."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError("BetaTypeII needs a > 0 and b > 0")

    def logpdf(self, w):
        w = _nonneg(w, "w")
        with np.errstate(divide="ignore"):
            out = (
                gammaln(self.a + self.b) - gammaln(self.a) - gammaln(self.b)
                + (self.a - 1.0) * np.log(w) - (self.a + self.b) * np.log1p(w)
            )
        return _scalar_or_array(out)

    def pdf(self, w):
        return _scalar_or_array(np.exp(self.logpdf(w)))

    def cdf(self, c):
        c = _nonneg(c, "c")
        return _scalar_or_array(betainc(self.a, self.b, c / (1.0 + c)))

    def sf(self, c):
        c = _nonneg(c, "c")
        return _scalar_or_array(betaincc(self.a, self.b, c / (1.0 + c)))

    def quantile(self, p):
        """Inverse CDF by doubling from 1 to bracket, then bisection."""
        p = _probability(p)
        hi = expand_upper(self.cdf, p, np.ones_like(p))
        out = bisect_increasing(self.cdf, p, np.zeros_like(p), hi, rtol=1e-12, maxiter=200)
        return _scalar_or_array(out)


def beta2_cdf_shape2(b: float, c):
    """Closed-form CDF of B2(2, b): ``1 - (1 + c (b+1)) / (1 + c)**(b+1)``.

    Kept as an independent cross-check of :meth:`BetaTypeII.cdf`.
    """
    c = _nonneg(c, "c")
    return _scalar_or_array(1.0 - (1.0 + c * (b + 1.0)) * np.exp(-(b + 1.0) * np.log1p(c)))
