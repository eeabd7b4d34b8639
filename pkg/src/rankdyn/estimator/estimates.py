"""Point estimates of rank-based volatilities, local times and relative growth rates."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..ranking import RankSharePanel

__all__ = [
    "EstimateSet",
    "LocalTimeSeries",
    "alpha_from_kappa",
    "annualize",
    "estimate",
    "estimate_from_increments",
    "estimate_local_times",
    "estimate_sigma2",
    "pair_increments",
]


@dataclass(frozen=True)
class LocalTimeSeries:
    """Cumulative local time of each adjacent rank gap, starting at zero."""

    values: np.ndarray = field(repr=False)  # (T, N-1)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    @property
    def terminal(self) -> np.ndarray:
        return self.values[-1]


@dataclass(frozen=True)
class EstimateSet:
    """Rank-based parameter estimates.

    ``alpha`` has length N, ``sigma2`` and ``kappa`` length N-1. Units are
    per period when ``per_year`` is False, per year otherwise.
    """

    alpha: np.ndarray
    sigma2: np.ndarray
    kappa: np.ndarray
    frequency: int = 1
    per_year: bool = False
    smoothed_alpha: Optional[np.ndarray] = None
    smoothed_sigma2: Optional[np.ndarray] = None
    smoothing_passes: Optional[int] = None
    fit_deviation: Optional[float] = None
    ci: Optional[object] = None  # BootstrapResult

    @property
    def n_entities(self) -> int:
        return len(self.alpha)

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(self.sigma2)

    @property
    def smoothed_kappa(self) -> Optional[np.ndarray]:
        if self.smoothed_alpha is None:
            return None
        return -2.0 * np.cumsum(self.smoothed_alpha)[:-1]

    def effective(self) -> tuple[np.ndarray, np.ndarray]:
        """(alpha, sigma2) to use for prediction: smoothed when available."""
        if self.smoothed_alpha is not None and self.smoothed_sigma2 is not None:
            return self.smoothed_alpha, self.smoothed_sigma2
        return self.alpha, self.sigma2

    def replace(self, **changes) -> "EstimateSet":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        smoothed = None
        if self.smoothed_alpha is not None:
            smoothed = {
                "alpha": self.smoothed_alpha.tolist(),
                "sigma2": self.smoothed_sigma2.tolist(),
                "kappa": self.smoothed_kappa.tolist(),
            }
        return {
            "alpha": np.asarray(self.alpha).tolist(),
            "sigma2": np.asarray(self.sigma2).tolist(),
            "kappa": np.asarray(self.kappa).tolist(),
            "smoothed": smoothed,
            "passes": self.smoothing_passes,
            "fit_deviation": self.fit_deviation,
            "frequency": self.frequency,
            "per_year": self.per_year,
            "ci": None if self.ci is None else self.ci.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EstimateSet":
        from .bootstrap import BootstrapResult

        sm = d.get("smoothed") or {}
        return cls(
            alpha=np.asarray(d["alpha"], dtype=float),
            sigma2=np.asarray(d["sigma2"], dtype=float),
            kappa=np.asarray(d["kappa"], dtype=float),
            frequency=int(d.get("frequency", 1)),
            per_year=bool(d.get("per_year", False)),
            smoothed_alpha=np.asarray(sm["alpha"], dtype=float) if sm else None,
            smoothed_sigma2=np.asarray(sm["sigma2"], dtype=float) if sm else None,
            smoothing_passes=d.get("passes"),
            fit_deviation=d.get("fit_deviation"),
            ci=BootstrapResult.from_dict(d["ci"]) if d.get("ci") else None,
        )


def pair_increments(r: RankSharePanel) -> tuple[np.ndarray, np.ndarray]:
    """Per adjacent-period contributions to the volatility and local-time estimates.

    Returns two (T-1, N-1) arrays: the squared change of each rank gap with
    entity identities frozen at t, and the local-time increment of each gap
    between t and t+1.
    """
    shares = np.asarray(r.shares)
    order = np.asarray(r.order)
    ranked = np.asarray(r.theta_ranked)
    logs = np.log(shares)

    # entities that held ranks at t, evaluated at t+1
    log_next_frozen = np.take_along_axis(logs[1:], order[:-1], axis=1)
    gap_next_frozen = log_next_frozen[:, :-1] - log_next_frozen[:, 1:]
    sq = (gap_next_frozen - np.asarray(r.gaps)[:-1]) ** 2

    top_now = np.cumsum(ranked[:-1], axis=1)[:, :-1]
    top_next = np.cumsum(ranked[1:], axis=1)[:, :-1]
    frozen_next = np.cumsum(np.take_along_axis(shares[1:], order[:-1], axis=1), axis=1)[:, :-1]
    # top_next is the largest k-subset sum, so the true ratio is >= 1; the
    # clip only removes round-off when the two subsets coincide in a
    # different order.
    log_ratio = np.maximum(np.log(top_next) - np.log(frozen_next), 0.0)
    dlt = log_ratio * 2.0 * top_now / ranked[:-1, :-1]
    return sq, dlt


def estimate_sigma2(r: RankSharePanel) -> np.ndarray:
    """Per-period sigma^2_k, averaged over the T-1 adjacent pairs."""
    sq, _ = pair_increments(r)
    return sq.mean(axis=0)


def estimate_local_times(r: RankSharePanel) -> tuple[LocalTimeSeries, np.ndarray]:
    """Cumulative local times from Lambda(0) = 0 and per-period kappa_k = Lambda(T_last) / (T-1)."""
    _, dlt = pair_increments(r)
    lam = np.vstack([np.zeros((1, dlt.shape[1])), np.cumsum(dlt, axis=0)])
    return LocalTimeSeries(lam), lam[-1] / dlt.shape[0]


def alpha_from_kappa(kappa) -> np.ndarray:
    """alpha_k = (kappa_{k-1} - kappa_k) / 2 with kappa_0 = 0; alpha_N closes the sum to zero."""
    kappa = np.asarray(kappa, dtype=float)
    padded = np.concatenate([[0.0], kappa])
    head = 0.5 * padded[:-1] - 0.5 * padded[1:]
    return np.concatenate([head, [-head.sum()]])


def annualize(e: EstimateSet, frequency: Optional[int] = None) -> EstimateSet:
    """Scale per-period drifts and variances linearly to per-year units."""
    if e.per_year:
        return e
    f = e.frequency if frequency is None else int(frequency)
    if f < 1:
        raise ValueError(f"frequency must be >= 1, got {f}")
    scale = lambda a: None if a is None else np.asarray(a) * f  # noqa: E731
    return replace(
        e,
        alpha=scale(e.alpha),
        sigma2=scale(e.sigma2),
        kappa=scale(e.kappa),
        smoothed_alpha=scale(e.smoothed_alpha),
        smoothed_sigma2=scale(e.smoothed_sigma2),
        frequency=f,
        per_year=True,
    )


def estimate_from_increments(sq: np.ndarray, dlt: np.ndarray, frequency: int = 1) -> EstimateSet:
    sigma2 = sq.mean(axis=0)
    kappa = dlt.sum(axis=0) / dlt.shape[0]
    return EstimateSet(alpha=alpha_from_kappa(kappa), sigma2=sigma2, kappa=kappa, frequency=frequency)


def estimate(r: RankSharePanel, per_year: bool = True) -> EstimateSet:
    """Full point estimation: sigma^2, local times, kappa and alpha.

    Annualized with the panel frequency unless ``per_year`` is False.
    """
    sq, dlt = pair_increments(r)
    e = estimate_from_increments(sq, dlt, frequency=r.frequency)
    return annualize(e) if per_year else e
