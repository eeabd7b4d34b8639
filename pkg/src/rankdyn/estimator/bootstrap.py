"""Pairs bootstrap for the rank-based estimates.

A resample draws T-1 adjacent-period pairs (t, t+1) with replacement and
reruns the whole estimation on them. Because every estimate is an average of
per-pair contributions, a resample reduces to a weighted mean of the
precomputed pair increments, with weights equal to how often each pair was
drawn.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..panel import SharePanel
from ..ranking import RankSharePanel, ranked_view
from .estimates import alpha_from_kappa, pair_increments
from .smoothing import smooth_parameters

__all__ = ["BootstrapResult", "bootstrap_ci", "bootstrap_samples", "resample_counts"]

PARAMS = ("alpha", "sigma2", "sigma", "kappa")


@dataclass(frozen=True)
class BootstrapResult:
    """Percentile intervals, per parameter, from ``n_resamples`` resamples."""

    lower: dict = field(repr=False)
    upper: dict = field(repr=False)
    level: float = 0.95
    n_resamples: int = 0
    seed: Optional[int] = None
    passes: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "resamples": self.n_resamples,
            "seed": self.seed,
            "passes": self.passes,
            "lower": {k: np.asarray(v).tolist() for k, v in self.lower.items()},
            "upper": {k: np.asarray(v).tolist() for k, v in self.upper.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BootstrapResult":
        return cls(
            lower={k: np.asarray(v, dtype=float) for k, v in d["lower"].items()},
            upper={k: np.asarray(v, dtype=float) for k, v in d["upper"].items()},
            level=float(d["level"]),
            n_resamples=int(d["resamples"]),
            seed=d.get("seed"),
            passes=d.get("passes"),
        )


def resample_counts(n_pairs: int, n_resamples: int, seed: int) -> np.ndarray:
    """(B, n_pairs) draw counts; resample b uses its own stream derived from (seed, b)."""
    root = np.random.SeedSequence(seed)
    counts = np.empty((n_resamples, n_pairs), dtype=np.int64)
    for b, child in enumerate(root.spawn(n_resamples)):
        idx = np.random.default_rng(child).integers(0, n_pairs, size=n_pairs)
        counts[b] = np.bincount(idx, minlength=n_pairs)
    return counts


def bootstrap_samples(
    r: RankSharePanel,
    n_resamples: int,
    seed: int = 0,
    per_year: bool = True,
    passes: Optional[int] = None,
) -> dict:
    """Estimates for every resample, keyed by parameter, each (B, len) arrays."""
    if n_resamples < 1:
        raise ValueError("need at least one resample")
    sq, dlt = pair_increments(r)
    n_pairs = sq.shape[0]
    w = resample_counts(n_pairs, n_resamples, seed) / n_pairs
    scale = r.frequency if per_year else 1
    sigma2 = (w @ sq) * scale
    kappa = (w @ dlt) * scale
    alpha = np.vstack([alpha_from_kappa(k) for k in kappa])
    if passes is not None:
        alpha, sigma2 = smooth_parameters(alpha, sigma2, passes)
        kappa = -2.0 * np.cumsum(alpha, axis=1)[:, :-1]
    return {"alpha": alpha, "sigma2": sigma2, "sigma": np.sqrt(sigma2), "kappa": kappa}


def bootstrap_ci(
    s: SharePanel | RankSharePanel,
    n_resamples: int = 1000,
    level: float = 0.95,
    seed: int = 0,
    per_year: bool = True,
    passes: Optional[int] = None,
) -> BootstrapResult:
    """Percentile confidence intervals for alpha, sigma^2, sigma and kappa.

    Bounds are the (1 - level)/2 and (1 + level)/2 empirical quantiles of the
    resample estimates, taken as order statistics. When ``passes`` is given,
    each resample is smoothed with that many passes before the quantiles are
    taken.
    """
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0, 1), got {level}")
    r = s if isinstance(s, RankSharePanel) else ranked_view(s)
    draws = bootstrap_samples(r, n_resamples, seed=seed, per_year=per_year, passes=passes)
    lo_q, hi_q = (1 - level) / 2, (1 + level) / 2
    lower = {k: np.quantile(draws[k], lo_q, axis=0, method="inverted_cdf") for k in PARAMS}
    upper = {k: np.quantile(draws[k], hi_q, axis=0, method="inverted_cdf") for k in PARAMS}
    return BootstrapResult(lower, upper, level=level, n_resamples=n_resamples, seed=seed, passes=passes)
