"""Monte Carlo checks of frequentist properties of the 1/theta-prior procedures.

* coverage of prediction regions across theta,
* the pivotal identity: the frequentist law of Y'/X equals the predictive
  law of Y'/x at x = 1,
* constancy in theta of Kullback-Leibler risk for scale-invariant
  predictive densities.

Every simulation takes a master seed. Each theta gets its own child stream
spawned from that seed, so reports are reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, stats
from scipy.special import gammaln

from . import _random
from .exceptions import DomainError
from .model import (
    NextNTarget,
    PairTarget,
    model_density_next_n,
    model_density_pair,
    model_spacing_rates,
    simulate_experiments,
    sufficient_statistics,
)
from .predictive import (
    GammaPrior,
    stable_marginal_y1,
    stable_marginal_y2,
    predictive_next_n,
    predictive_pair,
)
from .regions import DEFAULT_GRID, build_band_region, hpd_region

__all__ = [
    "CoverageReport",
    "RiskReport",
    "RatioCheck",
    "target_values",
    "unit_region",
    "coverage_simulation",
    "ratio_density",
    "ratio_density_check",
    "bayes_density",
    "plugin_density",
    "true_density",
    "kl_losses",
    "kl_risk_estimate",
    "kl_risk_profile",
]

MIN_COVERAGE_TRIALS = 1_000
MIN_RATIO_TRIALS = 10_000


def _report_csv(columns: dict[str, Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    for row in zip(*columns.values()):
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


@dataclass
class CoverageReport:
    thetas: list[float]
    trials: int
    coverage: list[float]
    stderr: list[float]
    target: float
    label: str = ""
    # band regions only: coverage recomputed with a doubled grid
    coverage_refined: list[float] | None = None

    def deviations(self) -> np.ndarray:
        """(coverage - target) / stderr per theta."""
        return (np.asarray(self.coverage) - self.target) / np.asarray(self.stderr)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CoverageReport":
        return cls(**json.loads(text))

    def to_csv(self) -> str:
        cols = {"theta": self.thetas, "coverage": self.coverage, "stderr": self.stderr,
                "target": [self.target] * len(self.thetas), "trials": [self.trials] * len(self.thetas)}
        if self.coverage_refined is not None:
            cols["coverage_refined_grid"] = self.coverage_refined
        return _report_csv(cols)


@dataclass
class RiskReport:
    thetas: list[float]
    risk: list[float]
    stderr: list[float]
    trials: int
    inner: int
    label: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RiskReport":
        return cls(**json.loads(text))

    def to_csv(self) -> str:
        return _report_csv({"theta": self.thetas, "risk": self.risk, "stderr": self.stderr,
                            "trials": [self.trials] * len(self.thetas)})


@dataclass
class RatioCheck:
    """KS goodness of fit of Y'/X against the x = 1 predictive, per coordinate."""

    thetas: list[float]
    trials: int
    ks_statistic: list[list[float]]
    ks_pvalue: list[list[float]]
    critical_value: float
    between_statistic: list[float] = field(default_factory=list)
    between_pvalue: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        fits = all(d < self.critical_value for row in self.ks_statistic for d in row)
        agree = all(p > 0.01 for p in self.between_pvalue)
        return fits and agree


# ---------------------------------------------------------------------------
# coverage


def target_values(observed: np.ndarray, future: np.ndarray, n: int, target) -> np.ndarray:
    """Realized spacing targets (trials, dim) from simulated order statistics."""
    m = observed.shape[-1]
    xm = observed[:, -1:]
    if isinstance(target, NextNTarget):
        target.validate(n, m)
        return np.diff(np.concatenate([xm, future[:, : target.N]], axis=1), axis=1)
    if isinstance(target, PairTarget):
        target.validate(n, m)
        xr = future[:, target.r - m - 1]
        xs = future[:, target.s - m - 1]
        return np.column_stack([xr - xm[:, 0], xs - xr])
    raise DomainError(f"unsupported target {target!r}")


def unit_region(prior: GammaPrior, n: int, m: int, target, lam: float, grid_size: int = DEFAULT_GRID):
    """The region for x + beta = 1.

    Both constructions depend on the data only through x + beta, as a scale,
    so the region for data x is this one scaled by x + beta.
    """
    unit = GammaPrior(prior.alpha, 0.0)
    if isinstance(target, NextNTarget):
        return hpd_region(unit, 1.0, n, m, target.N, lam)
    if isinstance(target, PairTarget):
        return build_band_region(unit, 1.0, n, m, target.r, target.s, lam, grid_size)
    raise DomainError(f"unsupported target {target!r}")


def coverage_simulation(n: int, m: int, target, lam: float, thetas: Sequence[float], trials: int,
                        seed=0, prior: GammaPrior | None = None,
                        grid_size: int = DEFAULT_GRID) -> CoverageReport:
    """Empirical frequentist coverage of the Bayesian region at each theta.

    Per trial: simulate a full sample, form the region from the censored
    part, and check whether the realized future spacings fall inside.
    """
    prior = prior or GammaPrior()
    if trials < MIN_COVERAGE_TRIALS:
        raise DomainError(f"coverage needs at least {MIN_COVERAGE_TRIALS} trials")
    base = unit_region(prior, n, m, target, lam, grid_size)
    refined = None
    if isinstance(target, PairTarget):
        refined = unit_region(prior, n, m, target, lam, 2 * grid_size)
    coverage, stderr, coverage_refined = [], [], []
    for theta, rng in zip(thetas, _random.spawn(seed, len(thetas))):
        observed, future = simulate_experiments(n, m, float(theta), rng, trials)
        scale = sufficient_statistics(observed, n) + prior.beta
        pts = target_values(observed, future, n, target) / scale[:, None]
        hit = base.contains(pts)
        p = float(hit.mean())
        coverage.append(p)
        stderr.append(math.sqrt(p * (1.0 - p) / trials))
        if refined is not None:
            coverage_refined.append(float(refined.contains(pts).mean()))
    return CoverageReport(
        [float(t) for t in thetas], trials, coverage, stderr, 1.0 - lam,
        label=repr(target), coverage_refined=coverage_refined if refined is not None else None,
    )


# ---------------------------------------------------------------------------
# pivotal ratio Y'/X


def ratio_density(r, n: int, m: int, target) -> float:
    """Frequentist density of R = Y'/X, ``int u**d q_1(r u) p(u) du``.

    ``q_1`` is the model density of Y' at theta = 1, ``p`` the Gamma(m, 1)
    density of X, and ``d`` the dimension of Y'.
    """
    r = np.asarray(r, dtype=float)
    d = target.dim
    if isinstance(target, NextNTarget):
        def q1(y):
            return model_density_next_n(n, m, target.N, 1.0, y)
    else:
        def q1(y):
            return model_density_pair(n, m, target.r, target.s, 1.0, y)

    def integrand(u):
        logp = (m - 1) * math.log(u) - u - gammaln(m)
        return u**d * q1(r * u) * math.exp(logp)

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=200)
    return val


def _unit_marginal_cdfs(n: int, m: int, target) -> list[Callable]:
    prior = GammaPrior()
    if isinstance(target, NextNTarget):
        pred = predictive_next_n(prior, 1.0, n, m, target.N)
        return [pred.marginal(i).cdf for i in range(target.N)]
    mix = predictive_pair(prior, 1.0, n, m, target.r, target.s)
    return [stable_marginal_y1(mix).cdf, stable_marginal_y2(mix).cdf]


def ratio_density_check(n: int, m: int, target, trials: int, seed=0,
                        thetas: Sequence[float] = (1.0, 5.0)) -> RatioCheck:
    """Compare the simulated law of Y'/X with the 1/theta-prior predictive at x = 1.

    Each coordinate gets a one-sample KS test per theta, and the first two
    theta runs are compared with a two-sample KS test.
    """
    target.validate(n, m)
    if trials < MIN_RATIO_TRIALS:
        raise DomainError(f"the ratio check needs at least {MIN_RATIO_TRIALS} draws")
    cdfs = _unit_marginal_cdfs(n, m, target)
    ratios = []
    for theta, rng in zip(thetas, _random.spawn(seed, len(thetas))):
        observed, future = simulate_experiments(n, m, float(theta), rng, trials)
        x = sufficient_statistics(observed, n)
        ratios.append(target_values(observed, future, n, target) / x[:, None])
    ks_stat, ks_p = [], []
    for R in ratios:
        res = [stats.kstest(R[:, k], cdf) for k, cdf in enumerate(cdfs)]
        ks_stat.append([float(t.statistic) for t in res])
        ks_p.append([float(t.pvalue) for t in res])
    between_stat, between_p = [], []
    if len(ratios) >= 2:
        for k in range(target.dim):
            res = stats.ks_2samp(ratios[0][:, k], ratios[1][:, k])
            between_stat.append(float(res.statistic))
            between_p.append(float(res.pvalue))
    crit = float(stats.kstwo.ppf(0.99, trials))
    return RatioCheck([float(t) for t in thetas], trials, ks_stat, ks_p, crit, between_stat, between_p)


# ---------------------------------------------------------------------------
# Kullback-Leibler risk for the next N spacings

DensityHandle = Callable[[np.ndarray, np.ndarray], np.ndarray]


def bayes_density(prior: GammaPrior, n: int, m: int, N: int) -> DensityHandle:
    """Predictive density handle ``(z, x) -> q_hat(z; x)`` for a Gamma prior."""
    k = model_spacing_rates(n, m, N)
    shape = m + prior.alpha
    log_norm = gammaln(shape + N) - gammaln(shape) + np.log(k).sum()

    def q(z, x):
        S = np.asarray(x, dtype=float) + prior.beta
        S = S[..., None] if S.ndim else S
        lin = np.einsum("...n,n->...", z, k) / S
        return np.exp(log_norm - N * np.log(S) - (shape + N) * np.log1p(lin))

    return q


def plugin_density(n: int, m: int, N: int) -> DensityHandle:
    """Model density with theta replaced by its MLE m / x."""
    k = model_spacing_rates(n, m, N)

    def q(z, x):
        theta = m / np.asarray(x, dtype=float)
        theta = theta[..., None] if theta.ndim else theta
        return np.exp(N * np.log(theta) + np.log(k).sum() - theta * np.einsum("...n,n->...", z, k))

    return q


def true_density(n: int, m: int, N: int, theta: float) -> DensityHandle:
    """The model density at a fixed theta; ignores x."""

    def q(z, x):
        return model_density_next_n(n, m, N, theta, z)

    return q


def kl_losses(n: int, m: int, N: int, theta: float, density: DensityHandle, trials: int,
              rng: np.random.Generator, inner: int = 1000, chunk: int = 500) -> np.ndarray:
    """Per-trial KL losses ``int q_theta log(q_theta / q_hat(.; X))``.

    X ~ Gamma(m, theta) is drawn per outer trial; the inner integral is a
    Monte Carlo average over ``inner`` draws of the spacings. ``density`` is
    a density handle ``(z[..., N], x[...]) -> q_hat``; z has shape
    (trials, inner, N) and x shape (trials,).
    """
    k = model_spacing_rates(n, m, N)
    log_true = N * math.log(theta) + np.log(k).sum()
    out = np.empty(trials)
    for start in range(0, trials, chunk):
        size = min(chunk, trials - start)
        x = _random.standard_gamma(rng, m, size) / theta
        z = _random.standard_exponential(rng, (size, inner, N)) / (theta * k)
        q_hat = np.asarray(density(z, x), dtype=float)
        if not np.all(q_hat > 0) or not np.all(np.isfinite(q_hat)):
            raise DomainError("density handle returned a nonpositive or invalid density")
        logq_hat = np.log(q_hat)
        logq = log_true - theta * (z @ k)
        out[start:start + size] = (logq - logq_hat).mean(axis=1)
    return out


def kl_risk_estimate(n: int, m: int, N: int, theta: float, density: DensityHandle, trials: int,
                     rng, inner: int = 1000) -> tuple[float, float]:
    """Monte Carlo KL risk and its standard error (from the outer loop)."""
    NextNTarget(N).validate(n, m)
    losses = kl_losses(n, m, N, theta, density, trials, _random.make_rng(rng), inner)
    return float(losses.mean()), float(losses.std(ddof=1) / math.sqrt(trials))


def kl_risk_profile(n: int, m: int, N: int, thetas: Sequence[float], density: DensityHandle,
                    trials: int, seed=0, inner: int = 1000, label: str = "") -> RiskReport:
    """KL risk across a theta grid, one spawned stream per theta."""
    risk, stderr = [], []
    for theta, rng in zip(thetas, _random.spawn(seed, len(thetas))):
        r, se = kl_risk_estimate(n, m, N, float(theta), density, trials, rng, inner)
        risk.append(r)
        stderr.append(se)
    return RiskReport([float(t) for t in thetas], risk, stderr, trials, inner, label)
