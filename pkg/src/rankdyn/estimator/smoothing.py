"""Repeated Gaussian smoothing across ranks with pass-count selection."""

from __future__ import annotations

from typing import Union

import numpy as np

from ..errors import InputError, NoStationaryPrediction, StationarityViolation
from .estimates import EstimateSet
from .stationary import DistributionCurve, curve_deviation, predict_gaps

__all__ = ["MAX_PASSES", "kernel_matrix", "smooth", "smooth_and_select", "smooth_parameters"]

MAX_PASSES = 100
BANDWIDTH = 1.0
HALF_WIDTH = 3


def kernel_matrix(n: int, bandwidth: float = BANDWIDTH, half_width: int = HALF_WIDTH) -> np.ndarray:
    """Row-stochastic Gaussian smoothing matrix over n ranks.

    Weights are truncated at +-half_width ranks and renormalized where the
    window runs past either end.
    """
    idx = np.arange(n)
    dist = idx[:, None] - idx[None, :]
    w = np.exp(-0.5 * (dist / bandwidth) ** 2)
    w[np.abs(dist) > half_width] = 0.0
    return w / w.sum(axis=1, keepdims=True)


def smooth(x, passes: int) -> np.ndarray:
    """Apply the rank kernel ``passes`` times to x (last axis = rank)."""
    x = np.asarray(x, dtype=float)
    k = kernel_matrix(x.shape[-1])
    for _ in range(passes):
        x = x @ k.T
    return x


def smooth_parameters(alpha, sigma2, passes: int) -> tuple[np.ndarray, np.ndarray]:
    """Smooth alpha and sigma (std-dev scale) separately; alpha is re-centred to sum to zero.

    Accepts single vectors or stacks of vectors (one row per resample).
    """
    a = smooth(alpha, passes)
    a = a - a.mean(axis=-1, keepdims=True)
    s = smooth(np.sqrt(np.asarray(sigma2, dtype=float)), passes)
    return a, s * s


def smooth_and_select(
    e: EstimateSet,
    observed: DistributionCurve,
    passes: Union[int, str] = "auto",
    metric: str = "log_price",
) -> EstimateSet:
    """Smooth estimates across ranks, choosing the pass count that best fits ``observed``.

    With ``passes="auto"`` every count in 1..100 is tried and the one with
    the smallest squared deviation between predicted and observed curves
    wins (ties go to fewer passes). Counts whose smoothed parameters admit
    no stationary distribution are skipped.
    """
    if passes == "auto":
        candidates = range(1, MAX_PASSES + 1)
    else:
        m = int(passes)
        if not 1 <= m <= MAX_PASSES:
            raise InputError(f"passes must be in [1, {MAX_PASSES}], got {m}")
        candidates = [m]

    k = kernel_matrix(len(e.alpha))
    ks = kernel_matrix(len(e.sigma2))
    a = np.asarray(e.alpha, dtype=float)
    s = np.sqrt(np.asarray(e.sigma2, dtype=float))
    best = None
    last_violation = None
    for m in range(1, max(candidates) + 1):
        a = k @ a
        a = a - a.mean()
        s = ks @ s
        if m not in candidates:
            continue
        try:
            gaps = predict_gaps(a, s * s)
        except StationarityViolation as exc:
            last_violation = exc
            continue
        dev = curve_deviation(DistributionCurve.from_gaps(gaps), observed, metric)
        if best is None or dev < best[0]:
            best = (dev, m, a.copy(), s * s)
    if best is None:
        raise NoStationaryPrediction(
            f"no smoothing pass count in {candidates[0]}..{candidates[-1]} gives a stationary "
            f"prediction (last: {last_violation})"
        )
    dev, m, a_best, s2_best = best
    return e.replace(smoothed_alpha=a_best, smoothed_sigma2=s2_best, smoothing_passes=m, fit_deviation=dev)
