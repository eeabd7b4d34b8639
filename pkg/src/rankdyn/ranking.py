"""Rank permutations, rank-sorted shares and adjacent log gaps.

Ties are broken so that the entity with the larger index takes the better
(smaller) rank. The public contract is 1-based; arrays named ``order`` are
the same permutations in 0-based form for numpy indexing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .panel import SharePanel, _frozen

__all__ = ["RankSharePanel", "rank_order", "rank_permutation", "ranked_view"]


def rank_order(values) -> np.ndarray:
    """0-based rank order along the last axis (descending, larger index wins ties).

    Works on a single vector or row-wise on a matrix.
    """
    v = np.asarray(values, dtype=float)
    n = v.shape[-1]
    # Reversing the columns and sorting stably puts larger original indices
    # first among equal values.
    rev = np.argsort(-v[..., ::-1], axis=-1, kind="stable")
    return (n - 1 - rev).astype(np.intp)


def rank_permutation(row) -> np.ndarray:
    """Map rank k (1-based position) to the 1-based index of the entity holding it.

    >>> rank_permutation([0.2, 0.5, 0.3]).tolist()
    [2, 3, 1]
    >>> rank_permutation([0.4, 0.4, 0.2]).tolist()
    [2, 1, 3]
    """
    row = np.asarray(row, dtype=float)
    if row.ndim != 1:
        raise ValueError("rank_permutation expects a single share vector")
    return rank_order(row) + 1


@dataclass(frozen=True)
class RankSharePanel:
    """Rank-sorted view of a share panel.

    Attributes
    ----------
    shares : (T, N) shares by entity, as in the source panel.
    order : (T, N) 0-based permutations; ``order[t, k]`` is the entity at rank k+1.
    theta_ranked : (T, N) shares sorted in non-increasing order.
    gaps : (T, N-1) adjacent log gaps ``log theta_(k) - log theta_(k+1)``.
    """

    shares: np.ndarray = field(repr=False)
    order: np.ndarray = field(repr=False)
    theta_ranked: np.ndarray = field(repr=False)
    gaps: np.ndarray = field(repr=False)
    frequency: int = 12
    entities: tuple[str, ...] = ()
    times: tuple[str, ...] = ()

    @property
    def perms(self) -> np.ndarray:
        """1-based permutations, one row per period."""
        return self.order + 1

    @property
    def n_entities(self) -> int:
        return self.shares.shape[1]

    @property
    def n_periods(self) -> int:
        return self.shares.shape[0]

    @property
    def log_shares(self) -> np.ndarray:
        return np.log(self.shares)


def ranked_view(s: SharePanel) -> RankSharePanel:
    shares = np.asarray(s.values)
    order = rank_order(shares)
    theta_ranked = np.take_along_axis(shares, order, axis=1)
    log_ranked = np.log(theta_ranked)
    gaps = log_ranked[:, :-1] - log_ranked[:, 1:]
    order.setflags(write=False)
    return RankSharePanel(
        shares=_frozen(shares),
        order=order,
        theta_ranked=_frozen(theta_ranked),
        gaps=_frozen(gaps),
        frequency=s.frequency,
        entities=s.entities,
        times=s.times,
    )
