"""Prediction regions for future spacings and their order-statistic images.

Two constructions are provided. For the next N spacings the HPD region is
a half-space cut from the positive orthant. For a pair (Y1, Y2) a band is
built in two steps: an interval A for Y1 centred at its predictive mean,
then for every y1 in A an interval B(y1) for Y2 centred at E(Y2 | y1),
each of credibility sqrt(1 - lambda) so the product has 1 - lambda.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._numerics import bisect_increasing, expand_upper
from .distributions import BetaTypeII, MultiParetoII
from .exceptions import DomainError, NumericalError
from .model import CensoredSample
from .predictive import (
    GammaPrior,
    ParetoMixture,
    SignedParetoMixture,
    mean_y1,
    predictive_next_n,
    predictive_pair,
    stable_conditional_y2,
    stable_marginal_y1,
)

__all__ = [
    "SPACINGS",
    "ORDER_STATISTICS",
    "Interval",
    "HalfSpaceRegion",
    "BandRegion",
    "hpd_region",
    "hpd_credibility",
    "step_levels",
    "step1_interval",
    "step2_interval",
    "build_band_region",
    "band_credibility",
    "to_order_statistics",
    "contains",
    "region_to_dict",
    "region_from_dict",
    "region_to_json",
    "region_from_json",
]

SPACINGS = "spacings"
ORDER_STATISTICS = "order_statistics"
DEFAULT_GRID = 256
_CREDIBILITY_TOL = 1e-10


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    center: float
    halfwidth: float
    mass: float

    def __contains__(self, t) -> bool:
        return self.lo <= t <= self.hi


@dataclass(frozen=True)
class HalfSpaceRegion:
    """``{p : sum(coefficients * p) <= bound}`` within the frame's domain.

    In the spacing frame the domain is the positive orthant. In the
    order-statistic frame it is ``origin <= t_1 <= t_2 <= ...``, the image of
    that orthant under the cumulative-sum map.
    """

    coefficients: tuple[float, ...]
    bound: float
    credibility: float
    frame: str = SPACINGS
    origin: float = 0.0

    def __post_init__(self):
        coefs = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coefs)
        if not coefs or any(not c > 0 for c in coefs):
            raise DomainError("half-space coefficients must be positive")
        if not self.bound > 0:
            raise DomainError("half-space bound must be positive")
        if self.frame not in (SPACINGS, ORDER_STATISTICS):
            raise DomainError(f"unknown frame {self.frame!r}")

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    def contains(self, points):
        p = np.asarray(points, dtype=float)
        if p.shape[-1:] != (self.dim,):
            raise DomainError(f"expected points of dimension {self.dim}, got shape {p.shape}")
        if self.frame == SPACINGS:
            inside = np.all(p >= 0, axis=-1)
        else:
            steps = np.diff(p, axis=-1, prepend=self.origin)
            inside = np.all(steps >= 0, axis=-1)
        out = inside & (p @ np.asarray(self.coefficients) <= self.bound)
        return bool(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "HalfSpaceRegion":
        """Image of the region under ``p -> factor * p``."""
        return replace(
            self,
            coefficients=tuple(c / factor for c in self.coefficients),
            origin=self.origin * factor,
        )

    def volume(self) -> float:
        """Lebesgue volume (the shear to order statistics has unit determinant)."""
        if self.frame != SPACINGS:
            raise DomainError("volume() is computed in the spacing frame")
        c = np.asarray(self.coefficients)
        return float(self.bound**self.dim / (math.factorial(self.dim) * np.prod(c)))


@dataclass(frozen=True)
class BandRegion:
    """``{(u, v) : u in A, lo(u) <= v <= hi(u)}`` with lo/hi linear between grid rows.

    In the spacing frame (u, v) = (y1, y2). In the order-statistic frame
    (u, v) = (x_r, x_s) and each row has been sheared and shifted.
    """

    a_lo: float
    a_hi: float
    grid: np.ndarray = field(repr=False)
    lo: np.ndarray = field(repr=False)
    hi: np.ndarray = field(repr=False)
    credibility: float = 0.95
    slice_credibility: float = math.sqrt(0.95)
    mean_curve: np.ndarray | None = field(default=None, repr=False)
    frame: str = SPACINGS
    origin: float = 0.0

    def __post_init__(self):
        for name in ("grid", "lo", "hi"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.mean_curve is not None:
            object.__setattr__(self, "mean_curve", np.asarray(self.mean_curve, dtype=float))
        if not self.a_lo <= self.a_hi:
            raise DomainError("band needs a_lo <= a_hi")
        if np.any(self.lo > self.hi):
            raise DomainError("band slices need lo <= hi")
        if len(self.grid) < 2 or np.any(np.diff(self.grid) <= 0):
            raise DomainError("band grid must be increasing with at least 2 points")
        if self.frame not in (SPACINGS, ORDER_STATISTICS):
            raise DomainError(f"unknown frame {self.frame!r}")

    @property
    def dim(self) -> int:
        return 2

    def slice_at(self, u):
        """Interpolated slice endpoints at ``u``."""
        return np.interp(u, self.grid, self.lo), np.interp(u, self.grid, self.hi)

    def contains(self, points):
        p = np.asarray(points, dtype=float)
        if p.shape[-1:] != (2,):
            raise DomainError(f"expected points of dimension 2, got shape {p.shape}")
        u, v = p[..., 0], p[..., 1]
        lo, hi = self.slice_at(u)
        out = (u >= self.a_lo) & (u <= self.a_hi) & (v >= lo) & (v <= hi)
        return bool(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "BandRegion":
        return replace(
            self,
            a_lo=self.a_lo * factor,
            a_hi=self.a_hi * factor,
            grid=self.grid * factor,
            lo=self.lo * factor,
            hi=self.hi * factor,
            mean_curve=None if self.mean_curve is None else self.mean_curve * factor,
            origin=self.origin * factor,
        )


def contains(region, point):
    return region.contains(point)


def _check_lambda(lam: float) -> None:
    if not 0 < lam < 1:
        raise DomainError("lambda must lie strictly inside (0, 1)")


# ---------------------------------------------------------------------------
# HPD half-space for the next N spacings


def hpd_region(prior: GammaPrior, x: float, n: int, m: int, N: int, lam: float) -> HalfSpaceRegion:
    """HPD region ``sum (n-m-i+1) z_i <= c0 (x + beta)``.

    Stored with coefficients divided by x + beta, so ``bound`` is c0, the
    1 - lambda quantile of B2(N, m + alpha).
    """
    _check_lambda(lam)
    pred = predictive_next_n(prior, x, n, m, N)
    c0 = BetaTypeII(N, m + prior.alpha).quantile(1.0 - lam)
    return HalfSpaceRegion(pred.rates, float(c0), 1.0 - lam)


def hpd_credibility(pred: MultiParetoII, region: HalfSpaceRegion) -> float:
    """Predictive mass of a spacing-frame half-space whose coefficients are
    the predictive's rates, through the Beta type II law of ``sum h_i Z_i``."""
    if region.frame != SPACINGS:
        raise DomainError("credibility is evaluated in the spacing frame")
    if not np.allclose(region.coefficients, pred.rates, rtol=1e-12, atol=0):
        raise DomainError("region coefficients do not match the predictive rates")
    return float(BetaTypeII(pred.dim, pred.shape).cdf(region.bound))


# ---------------------------------------------------------------------------
# two-step band for a pair of future order statistics


def step_levels(lam: float, split: tuple[float, float] | None = None) -> tuple[float, float]:
    """Per-step credibilities; equal ``sqrt(1 - lambda)`` unless ``split`` is given."""
    _check_lambda(lam)
    if split is None:
        level = math.sqrt(1.0 - lam)
        return level, level
    lam1, lam2 = split
    _check_lambda(lam1)
    _check_lambda(lam2)
    if not math.isclose((1 - lam1) * (1 - lam2), 1 - lam, rel_tol=1e-12):
        raise DomainError("split must satisfy (1 - lambda1)(1 - lambda2) = 1 - lambda")
    return 1.0 - lam1, 1.0 - lam2


def _centered_halfwidth(mixture, center, level, scale) -> np.ndarray:
    """Smallest Delta with mass of [center - Delta, center + Delta] (clipped at 0) = level."""
    center = np.asarray(center, dtype=float)

    def mass(delta):
        return mixture.interval_mass(center - delta, center + delta)

    start = np.maximum(center, 1e-3 * np.asarray(scale, dtype=float))
    hi = expand_upper(mass, level, start)
    delta = bisect_increasing(mass, level, np.zeros_like(hi), hi, rtol=1e-14, maxiter=200)
    err = np.abs(mass(delta) - level)
    if np.any(err > _CREDIBILITY_TOL):
        raise NumericalError(f"interval credibility off by {err.max():.3g}")
    return delta


def _upper_quantile(mixture, level, start) -> np.ndarray:
    """Smallest q with mass of [0, q] = level, for each batch row of ``start``."""

    def mass(q):
        return mixture.interval_mass(np.zeros_like(q), q)

    hi = expand_upper(mass, level, start)
    q = bisect_increasing(mass, level, np.zeros_like(hi), hi, rtol=1e-14, maxiter=200)
    err = np.abs(mass(q) - level)
    if np.any(err > _CREDIBILITY_TOL):
        raise NumericalError(f"slice credibility off by {err.max():.3g}")
    return q


def _interval(mixture, center: float, level: float, scale: float) -> Interval:
    delta = float(_centered_halfwidth(mixture, center, level, scale))
    lo = max(center - delta, 0.0)
    hi = center + delta
    return Interval(lo, hi, center, delta, float(mixture.interval_mass(lo, hi)))


def _pair_mixture(prior, x, n, m, r, s) -> SignedParetoMixture:
    return predictive_pair(prior, x, n, m, r, s)


def step1_interval(prior: GammaPrior, x: float, n: int, m: int, r: int, s: int, lam: float,
                   split: tuple[float, float] | None = None) -> Interval:
    """Interval A for Y1, centred at its predictive mean."""
    mix = _pair_mixture(prior, x, n, m, r, s)
    if mix.shape <= 1:
        raise DomainError("step 1 needs m + alpha > 1 so that E(Y1) exists")
    level, _ = step_levels(lam, split)
    return _interval(stable_marginal_y1(mix), mean_y1(mix), level, mix.scale)


def step2_interval(prior: GammaPrior, x: float, n: int, m: int, r: int, s: int, lam: float,
                   y1: float, split: tuple[float, float] | None = None, one_sided: bool = False) -> Interval:
    """Interval B(y1) for Y2 given Y1 = y1.

    By default it is centred at E(Y2 | y1) and clipped at 0; with
    ``one_sided`` it is ``[0, q]`` with q the conditional quantile.
    """
    mix = _pair_mixture(prior, x, n, m, r, s)
    _, level = step_levels(lam, split)
    cond = stable_conditional_y2(mix, float(y1))
    center = float(cond.mean())
    if one_sided:
        q = float(_upper_quantile(cond, level, np.array(1e-3 * mix.scale)))
        return Interval(0.0, q, center, q, float(cond.interval_mass(0.0, q)))
    return _interval(cond, center, level, mix.scale)


def _slices(mix: SignedParetoMixture, y1: np.ndarray, level: float, one_sided: bool = False):
    cond = stable_conditional_y2(mix, y1)
    mu2 = np.asarray(cond.mean(), dtype=float)
    if one_sided:
        return np.zeros_like(mu2), _upper_quantile(cond, level, np.full_like(mu2, 1e-3 * mix.scale)), mu2
    delta = _centered_halfwidth(cond, mu2, level, mix.scale)
    return np.maximum(mu2 - delta, 0.0), mu2 + delta, mu2


def build_band_region(prior: GammaPrior, x: float, n: int, m: int, r: int, s: int, lam: float,
                      grid_size: int = DEFAULT_GRID,
                      split: tuple[float, float] | None = None, one_sided: bool = False) -> BandRegion:
    """Two-step band with slices on a uniform grid of ``grid_size`` points over A.

    ``one_sided`` replaces the centred slices with ``[0, q(y1)]``.
    """
    if grid_size < 2:
        raise DomainError("grid_size must be >= 2")
    mix = _pair_mixture(prior, x, n, m, r, s)
    level1, level2 = step_levels(lam, split)
    A = step1_interval(prior, x, n, m, r, s, lam, split)
    grid = np.linspace(A.lo, A.hi, grid_size)
    lo, hi, mu2 = _slices(mix, grid, level2, one_sided)
    return BandRegion(A.lo, A.hi, grid, lo, hi, 1.0 - lam, level2, mu2)


def band_credibility(region: BandRegion, mix: SignedParetoMixture, nodes: int = 8) -> float:
    """Predictive mass of a spacing-frame band.

    Integrates the Y1 marginal times the closed-form conditional mass of the
    interpolated slice, with Gauss-Legendre rules on each grid cell.
    """
    if region.frame != SPACINGS:
        raise DomainError("credibility is evaluated in the spacing frame")
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    left, right = region.grid[:-1], region.grid[1:]
    half = 0.5 * (right - left)
    y1 = (0.5 * (left + right))[:, None] + half[:, None] * xg[None, :]
    w = half[:, None] * wg[None, :]
    y1 = y1.ravel()
    lo, hi = region.slice_at(y1)
    inner = stable_conditional_y2(mix, y1).interval_mass(lo, hi)
    return float(np.sum(w.ravel() * stable_marginal_y1(mix).pdf(y1) * inner))


# ---------------------------------------------------------------------------
# back-map to order statistics


def to_order_statistics(region, sample: CensoredSample):
    """Map a spacing-frame region to order-statistic coordinates.

    A band maps through ``(y1, y2) -> (y1 + x_m, y1 + y2 + x_m)``. A half-space
    over the next N spacings maps through ``t = x_m + cumsum(z)``, which turns
    ``sum c_i z_i <= b`` into ``sum (c_i - c_{i+1}) t_i <= b + c_1 x_m``.
    """
    if region.frame != SPACINGS:
        raise DomainError("region is already in order-statistic coordinates")
    xm = sample.last
    if isinstance(region, BandRegion):
        return replace(
            region,
            a_lo=region.a_lo + xm,
            a_hi=region.a_hi + xm,
            grid=region.grid + xm,
            lo=region.grid + region.lo + xm,
            hi=region.grid + region.hi + xm,
            mean_curve=None if region.mean_curve is None else region.grid + region.mean_curve + xm,
            frame=ORDER_STATISTICS,
            origin=xm,
        )
    if isinstance(region, HalfSpaceRegion):
        c = np.asarray(region.coefficients)
        d = c - np.append(c[1:], 0.0)
        return replace(
            region,
            coefficients=tuple(d),
            bound=region.bound + c[0] * xm,
            frame=ORDER_STATISTICS,
            origin=xm,
        )
    raise DomainError(f"unsupported region type {type(region).__name__}")


# ---------------------------------------------------------------------------
# serialization


def region_to_dict(region) -> dict:
    lam = 1.0 - region.credibility
    if isinstance(region, HalfSpaceRegion):
        return {
            "kind": "halfspace",
            "frame": region.frame,
            "lambda": lam,
            "credibility": region.credibility,
            "origin": region.origin,
            "coefficients": list(region.coefficients),
            "bound": region.bound,
        }
    if isinstance(region, BandRegion):
        rows = [
            {"u": float(u), "lo": float(a), "hi": float(b)}
            for u, a, b in zip(region.grid, region.lo, region.hi)
        ]
        if region.mean_curve is not None:
            for row, c in zip(rows, region.mean_curve):
                row["mean"] = float(c)
        return {
            "kind": "band",
            "frame": region.frame,
            "lambda": lam,
            "credibility": region.credibility,
            "slice_credibility": region.slice_credibility,
            "origin": region.origin,
            "A": [region.a_lo, region.a_hi],
            "grid": rows,
        }
    raise DomainError(f"unsupported region type {type(region).__name__}")


def region_from_dict(data: dict):
    kind = data.get("kind")
    if kind == "halfspace":
        return HalfSpaceRegion(
            tuple(data["coefficients"]), data["bound"], data["credibility"],
            data["frame"], data.get("origin", 0.0),
        )
    if kind == "band":
        rows = data["grid"]
        mean = [row["mean"] for row in rows] if rows and "mean" in rows[0] else None
        return BandRegion(
            data["A"][0], data["A"][1],
            [row["u"] for row in rows], [row["lo"] for row in rows], [row["hi"] for row in rows],
            data["credibility"], data["slice_credibility"], mean,
            data["frame"], data.get("origin", 0.0),
        )
    raise DomainError(f"unknown region kind {kind!r}")


def region_to_json(region, indent: int | None = 2) -> str:
    return json.dumps(region_to_dict(region), indent=indent)


def region_from_json(text: str):
    return region_from_dict(json.loads(text))
