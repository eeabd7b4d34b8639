"""Synthetic panels with known ground truth.

Two generators:

* :func:`simulate_stable_gaps` runs each adjacent rank gap as a reflected
  Brownian motion with drift ``-kappa_k`` and volatility ``sigma_k``.
* :func:`simulate_name_model` runs every entity's log level with a drift that
  depends on its current rank plus correlated Brownian noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit
from scipy.special import logsumexp

from .errors import InvalidSpec, NegativeGap
from .panel import Panel, SharePanel, _normalize_rows

__all__ = [
    "NameModelSpec",
    "SimOutput",
    "StableGapSpec",
    "gaps_to_shares",
    "gibrat_spec",
    "simulate_name_model",
    "simulate_stable_gaps",
]

DEFAULT_DT = 1.0 / 120.0
DEFAULT_SUBSTEPS = 10


def _labels(prefix: str, n: int) -> tuple[str, ...]:
    width = len(str(n))
    return tuple(f"{prefix}{i + 1:0{width}d}" for i in range(n))


def _period_labels(n: int) -> tuple[str, ...]:
    return tuple(str(t) for t in range(n))


@dataclass(frozen=True)
class SimOutput:
    """Simulated panel plus the quantities it was generated from.

    ``panel`` holds levels by entity. ``gaps`` and ``local_time`` are by rank
    and sampled at the panel's periods. ``truth`` holds ground-truth
    parameters (per year) as plain lists, ready for JSON.
    """

    panel: Panel
    gaps: np.ndarray = field(repr=False)
    local_time: Optional[np.ndarray] = field(default=None, repr=False)
    truth: dict = field(default_factory=dict)


# -- stable version ---------------------------------------------------------------


@dataclass(frozen=True)
class StableGapSpec:
    kappa: np.ndarray
    sigma: np.ndarray
    dt: float = 1e-3
    steps: int = 100_000
    seed: int = 0
    gap_init: Optional[np.ndarray] = None
    sample_every: int = 1

    def __post_init__(self):
        kappa = np.atleast_1d(np.asarray(self.kappa, dtype=float))
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float))
        if kappa.ndim != 1 or kappa.shape != sigma.shape:
            raise InvalidSpec("kappa and sigma must be vectors of equal length")
        if not (kappa > 0).all():
            raise InvalidSpec("kappa must be strictly positive")
        if not (sigma > 0).all():
            raise InvalidSpec("sigma must be strictly positive")
        if not self.dt > 0:
            raise InvalidSpec("dt must be positive")
        if int(self.steps) < 1 or int(self.sample_every) < 1:
            raise InvalidSpec("steps and sample_every must be positive integers")
        g0 = np.zeros_like(kappa) if self.gap_init is None else np.asarray(self.gap_init, dtype=float)
        if g0.shape != kappa.shape or not (g0 >= 0).all():
            raise InvalidSpec("gap_init must be non-negative with one entry per gap")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "gap_init", g0)

    @property
    def n_entities(self) -> int:
        return len(self.kappa) + 1


def simulate_stable_gaps(spec: StableGapSpec) -> SimOutput:
    """Euler scheme with reflection at zero for each rank gap.

    A proposal g' = g - kappa dt + sigma sqrt(dt) xi that falls below zero
    is mirrored to -g' and contributes -2 g' to that gap's local time. The
    mirrored crossing also swaps the two entities holding ranks k and k+1,
    which gives the entity-level panel its name dynamics.
    """
    n_gaps = len(spec.kappa)
    n = n_gaps + 1
    every = int(spec.sample_every)
    steps = int(spec.steps)
    rng = np.random.default_rng(spec.seed)

    drift = -spec.kappa * spec.dt
    vol = spec.sigma * np.sqrt(spec.dt)
    g = spec.gap_init.copy()
    lt = np.zeros(n_gaps)
    order = np.arange(n, dtype=np.intp)

    gaps_out = np.empty((steps + 1, n_gaps))
    lt_out = np.empty((steps + 1, n_gaps))
    order_out = np.empty((steps + 1, n), dtype=np.intp)
    gaps_out[0], lt_out[0], order_out[0] = g, lt, order

    chunk = max(1, min(steps, 20_000))
    done = 0
    while done < steps:
        m = min(chunk, steps - done)
        noise = rng.standard_normal((m * every, n_gaps))
        _reflect_chunk(g, lt, order, drift, vol, noise, every, done + 1, gaps_out, lt_out, order_out)
        done += m

    ranked = _ranked_shares(gaps_out)
    by_entity = np.empty_like(ranked)
    np.put_along_axis(by_entity, order_out, ranked, axis=1)
    frequency = max(1, int(round(1.0 / (spec.dt * every))))
    panel = Panel(_labels("e", n), _period_labels(steps + 1), by_entity, frequency)
    sigma2 = spec.sigma**2
    truth = {
        "model": "stable",
        "kappa": spec.kappa.tolist(),
        "sigma2": sigma2.tolist(),
        "alpha": _alpha_from_kappa_list(spec.kappa),
        "mean_gap": (sigma2 / (2 * spec.kappa)).tolist(),
        "dt": spec.dt,
        "sample_every": every,
        "steps": steps,
        "seed": spec.seed,
    }
    return SimOutput(panel=panel, gaps=gaps_out, local_time=lt_out, truth=truth)


@njit(cache=True)
def _reflect_chunk(g, lt, order, drift, vol, noise, every, row0, gaps_out, lt_out, order_out):
    n_gaps = g.shape[0]
    m = noise.shape[0] // every
    for j in range(m):
        for s in range(every):
            xi = noise[j * every + s]
            for k in range(n_gaps):
                gp = g[k] + drift[k] + vol[k] * xi[k]
                if gp < 0.0:
                    lt[k] -= 2.0 * gp
                    gp = -gp
                    tmp = order[k]
                    order[k] = order[k + 1]
                    order[k + 1] = tmp
                g[k] = gp
        gaps_out[row0 + j] = g
        lt_out[row0 + j] = lt
        order_out[row0 + j] = order


def _alpha_from_kappa_list(kappa) -> list:
    padded = np.concatenate([[0.0], kappa, [0.0]])
    return (0.5 * padded[:-1] - 0.5 * padded[1:]).tolist()


def _ranked_shares(gaps: np.ndarray) -> np.ndarray:
    levels = np.hstack([np.zeros((gaps.shape[0], 1)), -np.cumsum(gaps, axis=1)])
    levels -= logsumexp(levels, axis=1, keepdims=True)
    return _normalize_rows(np.exp(levels))


def gaps_to_shares(gaps, frequency: int = 12) -> SharePanel:
    """Rank-ordered shares whose adjacent log gaps are ``gaps`` (one row per period).

    Entities are identified with ranks: column k is the rank-(k+1) share.
    """
    g = np.atleast_2d(np.asarray(gaps, dtype=float))
    if (g < 0).any():
        t, k = np.argwhere(g < 0)[0]
        raise NegativeGap(f"gap {k + 1} at row {t} is negative ({g[t, k]})")
    shares = _ranked_shares(g)
    return SharePanel(_labels("r", shares.shape[1]), _period_labels(shares.shape[0]), shares, frequency)


# -- name-based model -------------------------------------------------------------


@dataclass(frozen=True)
class NameModelSpec:
    """Entity-level log dynamics d log x_i = mu_i dt + sum_s delta_is dB_s.

    ``rank_drift`` is either a length-N vector (the drift of whichever entity
    holds rank k) or an N x N matrix ``[i, k]`` (drift of entity i when it
    holds rank k). ``delta`` is the N x M loading matrix, M >= N. ``steps``
    counts sampled periods; each period is ``substeps`` Euler steps of size
    ``dt`` years. ``burn_in`` periods are simulated and discarded first.
    """

    rank_drift: np.ndarray
    delta: np.ndarray
    x0: Optional[np.ndarray] = None
    dt: float = DEFAULT_DT
    steps: int = 1000
    substeps: int = DEFAULT_SUBSTEPS
    seed: int = 0
    burn_in: int = 0
    nominal_alpha: Optional[np.ndarray] = None
    nominal_sigma2: Optional[np.ndarray] = None

    def __post_init__(self):
        delta = np.atleast_2d(np.asarray(self.delta, dtype=float))
        n, m = delta.shape
        if n < 2:
            raise InvalidSpec("need at least 2 entities")
        if m < n:
            raise InvalidSpec(f"noise dimension M={m} must be >= N={n}")
        if not np.isfinite(delta).all():
            raise InvalidSpec("delta must be finite")
        # Own loadings may be zero only to allow deterministic test runs.
        if (np.diag(delta[:, :n]) < 0).any():
            raise InvalidSpec("each entity needs a non-negative own-noise loading")
        mu = np.asarray(self.rank_drift, dtype=float)
        if mu.shape == (n,):
            mu = np.tile(mu, (n, 1))
        if mu.shape != (n, n) or not np.isfinite(mu).all():
            raise InvalidSpec("rank_drift must be length N or N x N")
        x0 = np.ones(n) if self.x0 is None else np.asarray(self.x0, dtype=float)
        if x0.shape != (n,) or not (x0 > 0).all():
            raise InvalidSpec("x0 must hold N positive levels")
        if not self.dt > 0:
            raise InvalidSpec("dt must be positive")
        if int(self.steps) < 1 or int(self.substeps) < 1 or int(self.burn_in) < 0:
            raise InvalidSpec("steps and substeps must be positive, burn_in non-negative")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "rank_drift", mu)
        object.__setattr__(self, "x0", x0)

    @property
    def n_entities(self) -> int:
        return self.delta.shape[0]

    @property
    def frequency(self) -> int:
        return max(1, int(round(1.0 / (self.dt * self.substeps))))

    @property
    def rank_is_common(self) -> bool:
        """True when the drift depends on rank only, not on which entity holds it."""
        return bool((self.rank_drift == self.rank_drift[0]).all())


def gibrat_spec(
    n: int = 10,
    a: float = -0.05,
    s2: float = 0.2,
    steps: int = 1000,
    seed: int = 0,
    dt: float = DEFAULT_DT,
    substeps: int = DEFAULT_SUBSTEPS,
    x0=None,
    burn_in: int = 0,
) -> NameModelSpec:
    """Gibrat preset: every rank above the last drifts at ``a`` relative to the
    cross-sectional mean and the bottom rank takes ``-(n-1) a`` so drifts sum
    to zero. Each entity has its own independent noise with variance ``s2``
    per year, so every adjacent gap has variance ``2 s2``.
    """
    if not a < 0:
        raise InvalidSpec("Gibrat preset needs a < 0")
    if not s2 >= 0:
        raise InvalidSpec("s2 must be non-negative")
    drift = np.full(n, float(a))
    drift[-1] = -(n - 1) * a
    return NameModelSpec(
        rank_drift=drift,
        delta=np.sqrt(s2) * np.eye(n),
        x0=x0,
        dt=dt,
        steps=steps,
        substeps=substeps,
        seed=seed,
        burn_in=burn_in,
        nominal_alpha=drift,
        nominal_sigma2=np.full(n - 1, 2.0 * s2),
    )


def stationary_start(alpha, sigma2) -> np.ndarray:
    """Levels whose ranked log gaps equal the predicted stationary means (entity i at rank i+1)."""
    partial = np.cumsum(np.asarray(alpha, dtype=float))[: len(sigma2)]
    gaps = np.asarray(sigma2, dtype=float) / (-4.0 * partial)
    return np.exp(np.concatenate([[0.0], -np.cumsum(gaps)]))


@njit(cache=True)
def _name_chunk(logx, mu, rho, dt, shocks, sub, burn_steps, step0, out, sigma2_acc):
    """Advance ``logx`` through ``shocks``; returns the number of accumulated steps."""
    n = logx.shape[0]
    ranks = np.empty(n, dtype=np.int64)
    drift = np.empty(n)
    rev = np.empty(n)
    n_acc = 0
    for j in range(shocks.shape[0]):
        for i in range(n):
            rev[i] = -logx[n - 1 - i]
        r = np.argsort(rev, kind="mergesort")
        order = n - 1 - r
        for k in range(n):
            ranks[order[k]] = k
        for i in range(n):
            drift[i] = mu[i, ranks[i]]
        step = step0 + j
        if step >= burn_steps:
            for k in range(n - 1):
                p = order[k]
                q = order[k + 1]
                sigma2_acc[k] += rho[p, p] + rho[q, q] - 2.0 * rho[p, q]
            n_acc += 1
        for i in range(n):
            logx[i] += drift[i] * dt + shocks[j, i]
        step += 1
        if step % sub == 0 and step >= burn_steps:
            out[(step - burn_steps) // sub] = logx
    return n_acc


def simulate_name_model(spec: NameModelSpec) -> SimOutput:
    """Log-Euler simulation of the entity-level model.

    Ranks are recomputed every Euler step (larger index wins ties). Ground
    truth holds the nominal parameters when known, plus the path average of
    the squared loading differences of adjacent ranks, which is the
    volatility parameter by definition.
    """
    n = spec.n_entities
    delta = spec.delta
    rho = delta @ delta.T
    sub = int(spec.substeps)
    steps = int(spec.steps)
    burn_steps = int(spec.burn_in) * sub
    rng = np.random.default_rng(spec.seed)
    sqdt = np.sqrt(spec.dt)

    logx = np.log(spec.x0)
    out = np.empty((steps + 1, n))
    out[0] = logx
    sigma2_acc = np.zeros(n - 1)
    n_acc = 0
    total = burn_steps + steps * sub
    chunk = 50_000
    done = 0
    while done < total:
        m = min(chunk, total - done)
        shocks = rng.standard_normal((m, delta.shape[1])) @ delta.T * sqdt
        n_acc += _name_chunk(logx, spec.rank_drift, rho, spec.dt, shocks, sub, burn_steps, done, out, sigma2_acc)
        done += m

    # One global shift keeps exp() in range without touching price relatives.
    levels = np.exp(out - 0.5 * (out.max() + out.min()))
    panel = Panel(_labels("e", n), _period_labels(steps + 1), levels, spec.frequency)
    truth = {
        "model": "name",
        "sigma2_realized": (sigma2_acc / n_acc).tolist(),
        "dt": spec.dt,
        "substeps": sub,
        "steps": steps,
        "burn_in": int(spec.burn_in),
        "seed": spec.seed,
        "frequency": spec.frequency,
    }
    alpha = spec.nominal_alpha
    if alpha is None and spec.rank_is_common:
        alpha = spec.rank_drift[0] - spec.rank_drift[0].mean()
    if alpha is not None:
        alpha = np.asarray(alpha, dtype=float)
        truth["alpha"] = alpha.tolist()
        truth["kappa"] = (-2.0 * np.cumsum(alpha)[:-1]).tolist()
    sigma2 = spec.nominal_sigma2 if spec.nominal_sigma2 is not None else truth["sigma2_realized"]
    truth["sigma2"] = np.asarray(sigma2, dtype=float).tolist()
    log_shares = out - logsumexp(out, axis=1, keepdims=True)
    ranked = -np.sort(-log_shares, axis=1)
    return SimOutput(panel=panel, gaps=ranked[:, :-1] - ranked[:, 1:], truth=truth)
