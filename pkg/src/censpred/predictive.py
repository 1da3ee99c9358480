"""Bayesian predictive densities of future spacings under Gamma priors.

The next N spacings have a multivariate Pareto type II predictive. An
arbitrary pair (Y1, Y2) of future order-statistic differences has a finite
mixture of bivariate Pareto laws whose weights alternate in sign; the
mixture is still a proper density, but evaluating it cancels, so every
mixture carries its condition number ``sum(|w|)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate, optimize
from scipy.linalg import eigh_tridiagonal
from scipy.special import betainc, betaincc, gammaln

from . import _random
from ._numerics import signed_sum
from .distributions import MultiParetoII, ParetoII, _nonneg
from .exceptions import DegradedPrecisionWarning, DomainError, NumericalError
from .model import PairTarget, _log_pair_const, model_spacing_rates

__all__ = [
    "GammaPrior",
    "GammaPosterior",
    "GammaWeightSet",
    "ParetoMixture",
    "SignedParetoMixture",
    "posterior",
    "predictive_next_n",
    "gamma_weights",
    "predictive_pair",
    "marginal_y1",
    "marginal_y2",
    "conditional_y2_given_y1",
    "conditional_y1_given_y2",
    "mean_y1",
    "conditional_mean_y2",
    "sample_pair_predictive",
    "pair_mode",
    "ThetaSpacingLaw",
    "marginal_y1_quadrature",
    "marginal_y2_quadrature",
    "stable_marginal_y2",
    "conditional_y2_quadrature",
    "stable_marginal_y1",
    "stable_conditional_y2",
    "stable_conditional_mean_y2",
    "CONDITION_LIMIT",
]

CONDITION_LIMIT = 1e8
# relative accuracy demanded of pointwise pair-density evaluation
POINTWISE_RTOL = 1e-10

# Gauss rule size for integrals against the posterior of theta
THETA_NODES = 128

# a batched signed mixture is evaluated in closed form only while its
# condition number keeps the rounding error below about 1e-12
ROW_CONDITION_LIMIT = 1e4


@dataclass(frozen=True)
class GammaPrior:
    """Gamma(alpha, beta) prior on the rate theta; (0, 0) is the 1/theta prior."""

    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (self.alpha >= 0 and self.beta >= 0):
            raise DomainError("prior hyperparameters must be nonnegative")

    @property
    def noninformative(self) -> bool:
        return self.alpha == 0 and self.beta == 0


@dataclass(frozen=True)
class GammaPosterior:
    shape: float
    rate: float

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    def logpdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (
            self.shape * np.log(self.rate) - gammaln(self.shape)
            + (self.shape - 1.0) * np.log(theta) - self.rate * theta
        )

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return _random.standard_gamma(rng, self.shape, count) / self.rate


def _check_data(prior: GammaPrior, x: float, m: int) -> None:
    if not x > 0:
        raise DomainError("sufficient statistic x must be positive")
    if m < 1:
        raise DomainError("m must be >= 1")
    if not prior.alpha + m > 0:
        raise DomainError("improper posterior: alpha + m must be positive")


def posterior(prior: GammaPrior, x: float, m: int) -> GammaPosterior:
    """Posterior of theta: Gamma(alpha + m, x + beta)."""
    _check_data(prior, x, m)
    return GammaPosterior(prior.alpha + m, x + prior.beta)


def predictive_next_n(prior: GammaPrior, x: float, n: int, m: int, N: int) -> MultiParetoII:
    """Predictive of the next N spacings, P2(m + alpha, (n-m-i+1)/(x+beta))."""
    _check_data(prior, x, m)
    rates = model_spacing_rates(n, m, N) / (x + prior.beta)
    return MultiParetoII(m + prior.alpha, tuple(rates))


@dataclass(frozen=True)
class GammaWeightSet:
    """Signed weights ``gamma_{c,d,k}``, k = 0..d-1, which sum to one.

    For integral ``c`` the weights are rational and ``exact`` holds them as
    Fractions; ``weights`` is always the float rendering.
    """

    c: float
    d: int
    weights: np.ndarray = field(repr=False)
    exact: tuple[Fraction, ...] | None = field(default=None, repr=False)

    @property
    def total(self) -> float:
        if self.exact is not None:
            return float(sum(self.exact, Fraction(0)))
        return math.fsum(self.weights)

    @property
    def condition(self) -> float:
        return float(np.abs(self.weights).sum())


@lru_cache(maxsize=8192)
def _exact_gamma_weights(c: int, d: int) -> tuple[Fraction, ...]:
    lead = Fraction(math.factorial(c + d - 1), math.factorial(c - 1))
    return tuple(
        lead * (-1) ** k / (math.factorial(k) * math.factorial(d - 1 - k) * (c + k))
        for k in range(d)
    )


def gamma_weights(c: float, d: int) -> GammaWeightSet:
    """``Gamma(c+d)/Gamma(c) * (-1)**k / (k! (d-1-k)!) / (c+k)`` for k < d.

    These come from expanding ``(1-t)**(d-1)`` inside the Beta integral.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")
    d = int(d)
    if float(c).is_integer():
        exact = _exact_gamma_weights(int(c), d)
        return GammaWeightSet(float(c), d, np.array([float(w) for w in exact]), exact)
    k = np.arange(d)
    logmag = gammaln(c + d) - gammaln(c) - gammaln(k + 1) - gammaln(d - k) - np.log(c + k)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return GammaWeightSet(float(c), d, sign * np.exp(logmag))


@dataclass(frozen=True)
class ParetoMixture:
    """Signed finite mixture of univariate Pareto II laws sharing one shape.

    ``weights`` and ``rates`` have shape (..., K); leading axes index a batch
    of independent mixtures (for example one conditional law per y1 value).
    """

    shape: float
    rates: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        rates, weights = np.broadcast_arrays(rates, weights)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "weights", weights)

    @property
    def condition(self):
        return np.abs(self.weights).sum(axis=-1)

    def _expand(self, t):
        t = _nonneg(t)
        return t[..., None]

    def pdf(self, t):
        tt = self._expand(t)
        logf = np.log(self.shape) + np.log(self.rates) - (self.shape + 1.0) * np.log1p(self.rates * tt)
        return signed_sum(self.weights * np.exp(logf))

    def sf(self, t):
        tt = self._expand(t)
        return signed_sum(self.weights * np.exp(-self.shape * np.log1p(self.rates * tt)))

    def cdf(self, t):
        tt = self._expand(t)
        return signed_sum(self.weights * -np.expm1(-self.shape * np.log1p(self.rates * tt)))

    def interval_mass(self, lo, hi):
        """Mass of ``[max(lo, 0), hi]``."""
        lo = np.maximum(np.asarray(lo, dtype=float), 0.0)[..., None]
        hi = np.asarray(hi, dtype=float)[..., None]
        terms = np.exp(-self.shape * np.log1p(self.rates * lo)) - np.exp(
            -self.shape * np.log1p(self.rates * hi)
        )
        return signed_sum(self.weights * terms)

    def mean(self):
        if self.shape <= 1:
            raise DomainError("mixture mean requires shape > 1")
        return signed_sum(self.weights / (self.rates * (self.shape - 1.0)))

    def components(self) -> list[tuple[float, ParetoII]]:
        if self.weights.ndim != 1:
            raise DomainError("components() is defined for a single mixture")
        return [(float(w), ParetoII(self.shape, float(h))) for w, h in zip(self.weights, self.rates)]


@dataclass(frozen=True)
class SignedParetoMixture:
    """Predictive of (Y1, Y2): ``sum_ij w_ij P2(m+alpha, a_i/S, b_j/S)``, S = x + beta.

    ``a_i = n - r + i + 1`` and ``b_j = n - s + j + 1``; the weights factor
    as ``w_ij = g1_i * g2_j`` with ``g1 = gamma_{n-r+1, r-m}`` and
    ``g2 = gamma_{n-s+1, s-r}``.
    """

    prior: GammaPrior
    x: float
    n: int
    m: int
    r: int
    s: int

    def __post_init__(self):
        _check_data(self.prior, self.x, self.m)
        PairTarget(self.r, self.s).validate(self.n, self.m)

    @property
    def shape(self) -> float:
        return self.m + self.prior.alpha

    @property
    def scale(self) -> float:
        """x + beta, the time scale of every component."""
        return self.x + self.prior.beta

    @cached_property
    def a(self) -> np.ndarray:
        return np.arange(self.r - self.m, dtype=float) + (self.n - self.r + 1)

    @cached_property
    def b(self) -> np.ndarray:
        return np.arange(self.s - self.r, dtype=float) + (self.n - self.s + 1)

    @cached_property
    def g1(self) -> GammaWeightSet:
        return gamma_weights(self.n - self.r + 1, self.r - self.m)

    @cached_property
    def g2(self) -> GammaWeightSet:
        return gamma_weights(self.n - self.s + 1, self.s - self.r)

    @cached_property
    def weights(self) -> np.ndarray:
        """Float weights w_ij, shape (r-m, s-r)."""
        if self.g1.exact is not None and self.g2.exact is not None:
            return np.array([[float(u * v) for v in self.g2.exact] for u in self.g1.exact])
        return np.outer(self.g1.weights, self.g2.weights)

    def exact_weights(self) -> list[list[Fraction]]:
        if self.g1.exact is None or self.g2.exact is None:
            raise DomainError("weights are not rational for this configuration")
        return [[u * v for v in self.g2.exact] for u in self.g1.exact]

    def weight_sum(self) -> float:
        """Sum of the weights, in exact arithmetic when they are rational."""
        if self.g1.exact is not None and self.g2.exact is not None:
            # the weights factor, so their sum is the product of the factor sums
            return float(sum(self.g1.exact, Fraction(0)) * sum(self.g2.exact, Fraction(0)))
        return math.fsum(self.weights.ravel())

    @property
    def condition(self) -> float:
        return self.g1.condition * self.g2.condition

    @property
    def degraded(self) -> bool:
        return self.condition > CONDITION_LIMIT

    def components(self) -> list[tuple[float, MultiParetoII]]:
        S = self.scale
        return [
            (float(self.weights[i, j]), MultiParetoII(self.shape, (ai / S, bj / S)))
            for i, ai in enumerate(self.a)
            for j, bj in enumerate(self.b)
        ]

    def pdf_mixture(self, y):
        """Closed-form evaluation, regardless of conditioning."""
        out, _ = self._mixture_terms(y)
        return float(out) if out.ndim == 0 else out

    def _mixture_terms(self, y):
        """Mixture value and the sum of absolute terms, which bounds its rounding error."""
        y = _nonneg(y, "y")
        if y.shape[-1:] != (2,):
            raise DomainError("y must have a trailing dimension of 2")
        S = self.scale
        ell = self.shape
        h1 = self.a / S
        h2 = self.b / S
        lin = h1[:, None] * y[..., 0, None, None] + h2[None, :] * y[..., 1, None, None]
        logg = (
            np.log(ell) + np.log(ell + 1.0)
            + np.log(h1)[:, None] + np.log(h2)[None, :]
            - (ell + 2.0) * np.log1p(lin)
        )
        terms = (self.weights * np.exp(logg)).reshape(*lin.shape[:-2], -1)
        return signed_sum(terms), np.abs(terms).sum(axis=-1)

    def pdf_quadrature(self, y):
        """Integral of the model density against the posterior of theta.

        With ``T = S + (n-r+1) y1 + (n-s+1) y2`` and ``u = theta T`` the
        integral becomes ``E g(U)`` for ``U ~ Gamma(k+2)``, k = m + alpha, with
        ``g(u) = (1 - exp(-u y1/T))**(r-m-1) * (1 - exp(-u y2/T))**(s-r-1)``.
        The integrand is positive, so adaptive quadrature keeps full relative
        accuracy wherever the closed form cancels.
        """
        y = _nonneg(y, "y")
        if y.shape[-1:] != (2,):
            raise DomainError("y must have a trailing dimension of 2")
        n, m, r, s = self.n, self.m, self.r, self.s
        k = self.shape
        S = self.scale
        p, q = r - m - 1, s - r - 1
        log_front = (
            _log_pair_const(n, m, r, s) + k * math.log(S) - math.lgamma(k) + math.lgamma(k + 2)
        )
        lg = math.lgamma(k + 2)
        u0 = k + 1.0  # mode of the Gamma(k+2) weight
        cuts = [0.0, *(u0 + c * math.sqrt(k + 2) for c in (-4, -2, 0, 2, 4, 8, 16) if u0 + c * math.sqrt(k + 2) > 0),
                math.inf]
        flat = y.reshape(-1, 2)
        out = np.empty(len(flat))
        for idx, (y1, y2) in enumerate(flat):
            T = S + (n - r + 1) * y1 + (n - s + 1) * y2
            rho1, rho2 = y1 / T, y2 / T
            if (p and rho1 == 0.0) or (q and rho2 == 0.0):
                out[idx] = 0.0
                continue

            def log_g(u):
                val = 0.0
                if p:
                    val += p * math.log(-math.expm1(-rho1 * u))
                if q:
                    val += q * math.log(-math.expm1(-rho2 * u))
                return val

            ref = log_g(u0)

            def integrand(u):
                if u <= 0.0:
                    return 0.0
                return math.exp((k + 1) * math.log(u) - u - lg + log_g(u) - ref)

            total = 0.0
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-10, limit=200)
                total += val
            out[idx] = math.exp(log_front - (k + 2) * math.log(T) + ref) * total
        out = out.reshape(y.shape[:-1])
        return float(out) if out.ndim == 0 else out

    def pdf(self, y):
        """Predictive density; falls back to quadrature when badly conditioned."""
        if self.degraded:
            warnings.warn(
                f"weight condition {self.condition:.3g} exceeds {CONDITION_LIMIT:.0e}; "
                "evaluating by quadrature over theta",
                DegradedPrecisionWarning,
                stacklevel=2,
            )
            return self.pdf_quadrature(y)
        out, magnitude = self._mixture_terms(y)
        # where the density is small next to the cancelling terms (near the
        # axes, where it vanishes polynomially) the closed form loses its
        # relative accuracy; those points go through quadrature instead
        loose = 16 * np.finfo(float).eps * magnitude > POINTWISE_RTOL * np.abs(out)
        if np.any(loose):
            y = np.asarray(y, dtype=float)
            out = np.array(out, dtype=float)
            out[loose] = self.pdf_quadrature(y[loose]) if out.ndim else self.pdf_quadrature(y)
        return float(out) if out.ndim == 0 else out


def predictive_pair(prior: GammaPrior, x: float, n: int, m: int, r: int, s: int) -> SignedParetoMixture:
    return SignedParetoMixture(prior, float(x), n, m, r, s)


def marginal_y1(mix: SignedParetoMixture) -> ParetoMixture:
    """Marginal of Y1: ``sum_i g1_i f_{m+alpha, a_i/S}``."""
    return ParetoMixture(mix.shape, mix.a / mix.scale, mix.g1.weights)


def marginal_y2(mix: SignedParetoMixture) -> ParetoMixture:
    """Marginal of Y2: ``sum_j g2_j f_{m+alpha, b_j/S}``."""
    return ParetoMixture(mix.shape, mix.b / mix.scale, mix.g2.weights)


def _posterior_component_weights(gw: np.ndarray, shape: float, rates: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Normalized ``gw_k f_{shape, rate_k}(t)``, shape t.shape + (K,)."""
    tt = t[..., None]
    f = np.exp(np.log(shape) + np.log(rates) - (shape + 1.0) * np.log1p(rates * tt))
    raw = gw * f
    return raw / signed_sum(raw)[..., None]


def conditional_y2_given_y1(mix: SignedParetoMixture, y1) -> ParetoMixture:
    """Law of Y2 given Y1 = y1 (batched over an array of y1)."""
    y1 = _nonneg(y1, "y1")
    S = mix.scale
    alpha_i = _posterior_component_weights(mix.g1.weights, mix.shape, mix.a / S, y1)
    w = alpha_i[..., :, None] * mix.g2.weights[None, :]
    rates = mix.b[None, :] / (S + mix.a[:, None] * y1[..., None, None])
    batch = y1.shape
    return ParetoMixture(mix.shape + 1.0, rates.reshape(*batch, -1), w.reshape(*batch, -1))


def conditional_y1_given_y2(mix: SignedParetoMixture, y2) -> ParetoMixture:
    """Law of Y1 given Y2 = y2 (batched over an array of y2)."""
    y2 = _nonneg(y2, "y2")
    S = mix.scale
    xi_j = _posterior_component_weights(mix.g2.weights, mix.shape, mix.b / S, y2)
    w = mix.g1.weights[:, None] * xi_j[..., None, :]
    rates = mix.a[:, None] / (S + mix.b[None, :] * y2[..., None, None])
    batch = y2.shape
    return ParetoMixture(mix.shape + 1.0, rates.reshape(*batch, -1), w.reshape(*batch, -1))


@lru_cache(maxsize=256)
def _gamma_rule(shape: float, nodes: int = THETA_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule for expectations under Gamma(shape, 1).

    Nodes and probabilities come from the eigen-decomposition of the Jacobi
    matrix of the generalized Laguerre polynomials, so no Gamma function is
    ever formed and large shapes stay finite.
    """
    alpha = shape - 1.0
    i = np.arange(nodes, dtype=float)
    diag = 2.0 * i + alpha + 1.0
    off = np.sqrt(i[1:] * (i[1:] + alpha))
    u, vec = eigh_tridiagonal(diag, off)
    w = vec[0] ** 2
    total = w.sum()
    if not np.all(np.isfinite(u)) or not np.isfinite(total) or total <= 0:
        raise NumericalError(f"no Gauss rule for Gamma shape {shape}")
    return u, w / total


def _psi_log(v: np.ndarray) -> np.ndarray:
    """log((1 - exp(-v)) / v), equal to 0 at v = 0."""
    safe = np.where(v > 0, v, 1.0)
    return np.where(v > 0, np.log(-np.expm1(-safe)) - np.log(safe), 0.0)


@dataclass(frozen=True)
class ThetaSpacingLaw:
    """Law of a sum of consecutive spacings, mixed over a discrete law of theta.

    Given theta, ``exp(-theta Y) ~ Beta(c, d)``, which is the law of the sum
    of ``d`` exponential spacings with rates ``c theta, ..., (c+d-1) theta``.
    ``theta`` and ``weights`` have shape (..., L), one node set per batch row.
    All weights are positive, so every evaluation is free of cancellation.
    ``inv_theta`` holds E(1/theta) per row, computed separately because the
    Gauss rule converges slowly for the singular integrand 1/theta.
    """

    c: float
    d: int
    theta: np.ndarray
    weights: np.ndarray
    inv_theta: np.ndarray

    def _cdf_given_theta(self, t):
        tt = _nonneg(t)[..., None]
        return betaincc(self.c, self.d, np.exp(-self.theta * tt))

    def cdf(self, t):
        return np.sum(self.weights * self._cdf_given_theta(t), axis=-1)

    def sf(self, t):
        tt = _nonneg(t)[..., None]
        return np.sum(self.weights * betainc(self.c, self.d, np.exp(-self.theta * tt)), axis=-1)

    def interval_mass(self, lo, hi):
        """Mass of ``[max(lo, 0), hi]``."""
        lo = np.maximum(np.asarray(lo, dtype=float), 0.0)[..., None]
        hi = np.asarray(hi, dtype=float)[..., None]
        ulo, uhi = np.exp(-self.theta * lo), np.exp(-self.theta * hi)
        # difference of lower-tail values where both are small, upper-tail otherwise
        lower = betaincc(self.c, self.d, uhi) - betaincc(self.c, self.d, ulo)
        upper = betainc(self.c, self.d, ulo) - betainc(self.c, self.d, uhi)
        terms = np.where(betaincc(self.c, self.d, uhi) < 0.5, lower, upper)
        return np.sum(self.weights * terms, axis=-1)

    def pdf(self, t):
        tt = _nonneg(t)[..., None]
        v = self.theta * tt
        logf = np.log(self.theta) - self.c * v - (gammaln(self.c) + gammaln(self.d) - gammaln(self.c + self.d))
        if self.d > 1:
            with np.errstate(divide="ignore"):
                logf = logf + (self.d - 1) * np.log(-np.expm1(-v))
        return np.sum(self.weights * np.exp(logf), axis=-1)

    def mean(self):
        if not np.all(np.isfinite(self.inv_theta)):
            raise DomainError("mean requires a finite posterior mean of 1/theta")
        harmonic = math.fsum(1.0 / (self.c + j) for j in range(self.d))
        return harmonic * self.inv_theta


def _theta_law_given_y1(mix: "SignedParetoMixture", y1: np.ndarray):
    """Gauss nodes, weights and E(1/theta) for theta given x and Y1 = y1.

    The posterior is proportional to ``theta^k exp(-theta T1) (1 - exp(-theta y1))^p``
    with ``k = m + alpha``, ``T1 = S + (n-r+1) y1`` and ``p = r - m - 1``.
    Writing ``u = theta T1`` it becomes ``u^(k+p) exp(-u) psi(rho u)^p`` with
    ``rho = y1 / T1`` and ``psi(v) = (1 - exp(-v)) / v``, a bounded smooth factor
    against a Gamma(k+p+1) base law.
    """
    p = mix.r - mix.m - 1
    a = float(mix.shape + p + 1)
    T1 = mix.scale + (mix.n - mix.r + 1) * y1
    rho = (y1 / T1)[..., None]

    def tilted(shape):
        u, w = _gamma_rule(shape)
        with np.errstate(divide="ignore"):
            logw = np.log(w) + p * _psi_log(rho * u)
        top = logw.max(axis=-1, keepdims=True)
        W = np.exp(logw - top)
        return u, W, W.sum(axis=-1), top[..., 0]

    u, W, total, top = tilted(a)
    # E(1/u) under the tilted Gamma(a) law equals the tilted Gamma(a-1) total over (a-1)
    _, _, total_lower, top_lower = tilted(a - 1.0)
    inv_u = total_lower / total * np.exp(top_lower - top) / (a - 1.0)
    return u / T1[..., None], W / total[..., None], inv_u * T1


def marginal_y1_quadrature(mix: "SignedParetoMixture") -> ThetaSpacingLaw:
    """Marginal of Y1 mixed over the Gamma(m + alpha, x + beta) posterior by Gauss quadrature."""
    return _marginal_quadrature(mix, mix.n - mix.r + 1, mix.r - mix.m)


def marginal_y2_quadrature(mix: "SignedParetoMixture") -> ThetaSpacingLaw:
    """Marginal of Y2 mixed over the Gamma(m + alpha, x + beta) posterior by Gauss quadrature."""
    return _marginal_quadrature(mix, mix.n - mix.s + 1, mix.s - mix.r)


def _marginal_quadrature(mix: "SignedParetoMixture", c: int, d: int) -> ThetaSpacingLaw:
    u, w = _gamma_rule(float(mix.shape))
    inv = np.asarray(mix.scale / (mix.shape - 1.0) if mix.shape > 1 else np.inf)
    return ThetaSpacingLaw(c, d, u / mix.scale, w, inv)


def conditional_y2_quadrature(mix: "SignedParetoMixture", y1) -> ThetaSpacingLaw:
    """Law of Y2 given Y1 = y1 by Gauss quadrature over theta (batched over y1)."""
    y1 = _nonneg(y1, "y1")
    theta, w, inv = _theta_law_given_y1(mix, y1)
    return ThetaSpacingLaw(mix.n - mix.s + 1, mix.s - mix.r, theta, w, inv)


@dataclass(frozen=True)
class RowwiseLaw:
    """Batched law that takes each row from ``closed`` or, where ``use_robust``, from ``robust``."""

    closed: ParetoMixture | None
    robust: ThetaSpacingLaw | None
    use_robust: np.ndarray

    def _pick(self, method, *args):
        if self.robust is None:
            return getattr(self.closed, method)(*args)
        if self.closed is None:
            return getattr(self.robust, method)(*args)
        with np.errstate(all="ignore"):
            a = getattr(self.closed, method)(*args)
        return np.where(self.use_robust, getattr(self.robust, method)(*args), a)

    def interval_mass(self, lo, hi):
        return self._pick("interval_mass", lo, hi)

    def cdf(self, t):
        return self._pick("cdf", t)

    def sf(self, t):
        return self._pick("sf", t)

    def pdf(self, t):
        return self._pick("pdf", t)

    def mean(self):
        return self._pick("mean")


def _row_condition(mix: "SignedParetoMixture", y1: np.ndarray) -> np.ndarray:
    """Condition number of the closed-form conditional of Y2 at each y1."""
    S = mix.scale
    tt = y1[..., None]
    with np.errstate(all="ignore"):
        logf = np.log(mix.a / S) - (mix.shape + 1.0) * np.log1p(mix.a / S * tt)
        raw = mix.g1.weights * np.exp(logf - logf.max(axis=-1, keepdims=True))
        kappa1 = np.abs(raw).sum(axis=-1) / np.abs(signed_sum(raw))
    kappa = kappa1 * mix.g2.condition
    return np.where(np.isfinite(kappa), kappa, np.inf)


def stable_conditional_y2(mix: "SignedParetoMixture", y1) -> RowwiseLaw:
    """Law of Y2 given Y1 = y1 that is accurate for every y1.

    Rows whose closed-form signed mixture is well conditioned use it; the
    rest are integrated over the posterior of theta with a Gauss rule.
    """
    y1 = _nonneg(y1, "y1")
    robust_rows = _row_condition(mix, y1) > ROW_CONDITION_LIMIT
    closed = None if np.all(robust_rows) else conditional_y2_given_y1(mix, y1)
    robust = conditional_y2_quadrature(mix, y1) if np.any(robust_rows) else None
    return RowwiseLaw(closed, robust, robust_rows)


def stable_marginal_y1(mix: "SignedParetoMixture"):
    """Marginal of Y1, by quadrature over theta when the closed form is ill conditioned."""
    if mix.g1.condition > ROW_CONDITION_LIMIT:
        return marginal_y1_quadrature(mix)
    return marginal_y1(mix)


def stable_marginal_y2(mix: "SignedParetoMixture"):
    """Marginal of Y2, by quadrature over theta when the closed form is ill conditioned."""
    if mix.g2.condition > ROW_CONDITION_LIMIT:
        return marginal_y2_quadrature(mix)
    return marginal_y2(mix)


def stable_conditional_mean_y2(mix: "SignedParetoMixture", y1):
    """E(Y2 | Y1 = y1), accurate for every y1."""
    y1 = _nonneg(y1, "y1")
    out = stable_conditional_y2(mix, y1).mean()
    return float(out) if np.ndim(out) == 0 else out


def mean_y1(mix: SignedParetoMixture) -> float:
    """Predictive mean of Y1, ``S/(m+alpha-1) * sum_i 1/(n-m-i)`` over i < r-m.

    This equals ``S/(m+alpha-1) * sum_i g1_i / a_i`` but has no cancellation.
    """
    if mix.shape <= 1:
        raise DomainError("mean of Y1 requires m + alpha > 1")
    harmonic = math.fsum(1.0 / (mix.n - mix.m - i) for i in range(mix.r - mix.m))
    return float(mix.scale / (mix.shape - 1.0) * harmonic)


def conditional_mean_y2(mix: SignedParetoMixture, y1):
    """E(Y2 | Y1 = y1) = sum_ij alpha_i(y1) g2_j (S + a_i y1) / ((m+alpha) b_j)."""
    y1 = _nonneg(y1, "y1")
    S = mix.scale
    alpha_i = _posterior_component_weights(mix.g1.weights, mix.shape, mix.a / S, y1)
    inner = signed_sum(mix.g2.weights / mix.b)
    out = signed_sum(alpha_i * (S + mix.a * y1[..., None])) * inner / mix.shape
    return float(out) if np.ndim(out) == 0 else out


def sample_pair_predictive(mix: SignedParetoMixture, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draws from the pair predictive by composition.

    theta comes from the posterior, then ``exp(-theta Y1) ~ Beta(n-r+1, r-m)``
    and ``exp(-theta Y2) ~ Beta(n-s+1, s-r)`` independently.
    """
    theta = posterior(mix.prior, mix.x, mix.m).sample(rng, count)
    b1 = _random.beta(rng, mix.n - mix.r + 1, mix.r - mix.m, count)
    b2 = _random.beta(rng, mix.n - mix.s + 1, mix.s - mix.r, count)
    return np.column_stack([-np.log(b1) / theta, -np.log(b2) / theta])


def pair_mode(mix: SignedParetoMixture) -> np.ndarray:
    """Numerical maximizer of the pair predictive (no unimodality guarantee).

    Runs a bounded quasi-Newton search from a few starting points and keeps
    the best.
    """
    S = mix.scale
    starts = [(0.0, 0.0), (mean_y1(mix) if mix.shape > 1 else S / mix.a[0], 0.0)]
    starts.append((starts[1][0], float(conditional_mean_y2(mix, starts[1][0]))))

    def negdens(p):
        return -mix.pdf(np.maximum(p, 0.0))

    best = None
    for x0 in starts:
        res = optimize.minimize(negdens, np.asarray(x0, dtype=float), method="L-BFGS-B",
                                bounds=[(0.0, None), (0.0, None)])
        if best is None or res.fun < best.fun:
            best = res
    return np.maximum(best.x, 0.0)
