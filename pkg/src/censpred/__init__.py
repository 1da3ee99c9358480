"""Bayesian prediction of future order statistics from type-II censored exponential samples."""

from .distributions import BetaTypeII, MultiParetoII, ParetoII
from .exceptions import DegradedPrecisionWarning, DomainError, NumericalError
from .model import (
    CensoredSample,
    NextNTarget,
    PairTarget,
    murthy_lifetimes,
    simulate_experiment,
    sufficient_statistic,
)
from .predictive import (
    GammaPrior,
    conditional_mean_y2,
    conditional_y1_given_y2,
    conditional_y2_given_y1,
    gamma_weights,
    marginal_y1,
    marginal_y2,
    mean_y1,
    posterior,
    predictive_next_n,
    predictive_pair,
)
from .regions import (
    BandRegion,
    HalfSpaceRegion,
    build_band_region,
    contains,
    hpd_region,
    step1_interval,
    step2_interval,
    to_order_statistics,
)
from .verify import coverage_simulation, kl_risk_profile, ratio_density_check

__version__ = "0.1.0"

__all__ = [
    "BandRegion", "BetaTypeII", "CensoredSample", "DegradedPrecisionWarning", "DomainError",
    "GammaPrior", "HalfSpaceRegion", "MultiParetoII", "NextNTarget", "NumericalError", "PairTarget",
    "ParetoII", "build_band_region", "conditional_mean_y2", "conditional_y1_given_y2",
    "conditional_y2_given_y1", "contains", "coverage_simulation", "gamma_weights", "hpd_region",
    "kl_risk_profile", "marginal_y1", "marginal_y2", "mean_y1", "murthy_lifetimes", "posterior",
    "predictive_next_n", "predictive_pair", "ratio_density_check", "simulate_experiment",
    "step1_interval", "step2_interval", "sufficient_statistic", "to_order_statistics",
]
