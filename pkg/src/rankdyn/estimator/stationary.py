"""Stationary rank distributions: predicted from parameters, observed from data."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..errors import NonStationary, StationarityViolation
from ..ranking import RankSharePanel
from .estimates import EstimateSet

__all__ = [
    "DistributionCurve",
    "GibratSolution",
    "curve_deviation",
    "gibrat_closed_form",
    "local_pareto_slopes",
    "observed_average_gaps",
    "predict_gaps",
    "predict_stationary_gaps",
]


@dataclass(frozen=True)
class DistributionCurve:
    """Expected adjacent log gaps by rank, with log share levels.

    For predictions the levels are anchored so that the shares sum to one;
    for observations they are time averages of log theta_(k).
    """

    gaps: np.ndarray
    log_shares: np.ndarray = field(repr=False)
    kind: str = "predicted"

    @property
    def n_entities(self) -> int:
        return len(self.log_shares)

    @property
    def log_relative_prices(self) -> np.ndarray:
        return self.log_shares + np.log(self.n_entities)

    @classmethod
    def from_gaps(cls, gaps, kind: str = "predicted") -> "DistributionCurve":
        gaps = np.asarray(gaps, dtype=float)
        levels = np.concatenate([[0.0], -np.cumsum(gaps)])
        levels -= logsumexp(levels)
        return cls(gaps=gaps, log_shares=levels, kind=kind)


def predict_gaps(alpha, sigma2) -> np.ndarray:
    """Expected gap sigma^2_k / (-4 (alpha_1 + ... + alpha_k)) for k = 1..N-1."""
    alpha = np.asarray(alpha, dtype=float)
    sigma2 = np.asarray(sigma2, dtype=float)
    partial = np.cumsum(alpha)[: len(sigma2)]
    bad = np.flatnonzero(partial >= 0)
    if bad.size:
        k = int(bad[0])
        raise StationarityViolation(k + 1, float(partial[k]))
    return sigma2 / (-4.0 * partial)


def predict_stationary_gaps(e: EstimateSet) -> DistributionCurve:
    alpha, sigma2 = e.effective()
    return DistributionCurve.from_gaps(predict_gaps(alpha, sigma2), kind="predicted")


def observed_average_gaps(r: RankSharePanel, drop_first: int = 0) -> DistributionCurve:
    """Time-average of the ranked log gaps and log shares over periods t >= drop_first."""
    if not 0 <= drop_first < r.n_periods:
        raise ValueError(f"drop_first must be in [0, {r.n_periods}), got {drop_first}")
    gaps = np.asarray(r.gaps)[drop_first:].mean(axis=0)
    log_shares = np.log(np.asarray(r.theta_ranked)[drop_first:]).mean(axis=0)
    return DistributionCurve(gaps=gaps, log_shares=log_shares, kind="observed")


def curve_deviation(predicted: DistributionCurve, observed: DistributionCurve, metric: str = "log_price") -> float:
    """Sum over ranks of squared differences between two curves.

    ``log_price`` compares log relative price levels, ``gap`` compares
    adjacent gaps.
    """
    if metric == "log_price":
        d = predicted.log_relative_prices - observed.log_relative_prices
    elif metric == "gap":
        d = predicted.gaps - observed.gaps
    else:
        raise ValueError(f"unknown deviation metric {metric!r}")
    return float(np.sum(d * d))


def local_pareto_slopes(curve: DistributionCurve) -> np.ndarray:
    """Log-log slope of share versus rank near each rank, approximated by -k * gap_k."""
    k = np.arange(1, len(curve.gaps) + 1)
    return -k * curve.gaps


@dataclass(frozen=True)
class GibratSolution:
    curve: DistributionCurve
    pareto_slope: float

    @property
    def pareto_exponent(self) -> float:
        return -self.pareto_slope


def gibrat_closed_form(alpha: float, sigma2: float, n: int) -> GibratSolution:
    """Closed-form stationary curve when every rank shares one alpha and sigma^2."""
    if not alpha < 0:
        raise NonStationary(f"Gibrat stationarity needs alpha < 0, got {alpha}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    k = np.arange(1, n)
    gaps = sigma2 / (-4.0 * k * alpha)
    return GibratSolution(DistributionCurve.from_gaps(gaps), sigma2 / (4.0 * alpha))
