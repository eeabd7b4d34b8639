"""Equal-weight rank portfolios and the size-effect backtest."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import EmptyRankSet
from .panel import Panel
from .ranking import rank_order

__all__ = ["PortfolioSeries", "SizeEffectReport", "backtest_rank_portfolio", "size_effect_summary"]


@dataclass(frozen=True)
class PortfolioSeries:
    ranks: tuple[int, ...]
    log_value: np.ndarray = field(repr=False)  # length T, starts at 0
    period_returns: np.ndarray = field(repr=False)  # length T-1, simple returns
    frequency: int = 12

    @property
    def avg_period_return(self) -> float:
        return float(self.period_returns.mean())

    @property
    def avg_annual_return(self) -> float:
        """Mean simple return over consecutive full years (blocks of ``frequency`` periods).

        Falls back to compounding the mean period return when the sample is
        shorter than one year.
        """
        f = self.frequency
        n_years = len(self.period_returns) // f
        if n_years == 0:
            return float((1.0 + self.avg_period_return) ** f - 1.0)
        lv = self.log_value[: n_years * f + 1 : f]
        return float(np.mean(np.expm1(np.diff(lv))))


def backtest_rank_portfolio(p: Panel, ranks: Iterable[int]) -> PortfolioSeries:
    """Rebalance every period into equal weights on the entities holding ``ranks`` (1-based).

    Selection uses period-t levels; the period return is the mean price
    relative x_i(t+1)/x_i(t) - 1 over the selected entities.
    """
    n = p.n_entities
    ranks = tuple(sorted(set(int(k) for k in ranks)))
    if not ranks:
        raise EmptyRankSet("rank set is empty")
    if ranks[0] < 1 or ranks[-1] > n:
        raise EmptyRankSet(f"ranks must lie in 1..{n}, got {ranks}")
    x = np.asarray(p.values)
    order = rank_order(x)
    held = order[:-1, [k - 1 for k in ranks]]
    relatives = np.take_along_axis(x[1:], held, axis=1) / np.take_along_axis(x[:-1], held, axis=1)
    returns = relatives.mean(axis=1) - 1.0
    log_value = np.concatenate([[0.0], np.cumsum(np.log1p(returns))])
    return PortfolioSeries(ranks, log_value, returns, p.frequency)


@dataclass(frozen=True)
class SizeEffectReport:
    expensive: PortfolioSeries
    cheap: PortfolioSeries
    split_rank: int

    @property
    def relative_log_value(self) -> np.ndarray:
        """Log value of the cheap portfolio relative to the expensive one."""
        return self.cheap.log_value - self.expensive.log_value

    @property
    def annual_spread(self) -> float:
        return self.cheap.avg_annual_return - self.expensive.avg_annual_return

    def summary(self) -> dict:
        return {
            "split_rank": self.split_rank,
            "expensive_ranks": list(self.expensive.ranks),
            "cheap_ranks": list(self.cheap.ranks),
            "expensive_avg_period_return": self.expensive.avg_period_return,
            "cheap_avg_period_return": self.cheap.avg_period_return,
            "expensive_avg_annual_return": self.expensive.avg_annual_return,
            "cheap_avg_annual_return": self.cheap.avg_annual_return,
            "annual_spread": self.annual_spread,
            "terminal_relative_log_value": float(self.relative_log_value[-1]),
        }


def size_effect_summary(p: Panel, split_rank: Optional[int] = None) -> SizeEffectReport:
    """Top ``split_rank`` ranks versus the rest; default split is ceil(N/2)."""
    n = p.n_entities
    split = math.ceil(n / 2) if split_rank is None else int(split_rank)
    if not 1 <= split < n:
        raise EmptyRankSet(f"split rank must be in 1..{n - 1}, got {split}")
    return SizeEffectReport(
        expensive=backtest_rank_portfolio(p, range(1, split + 1)),
        cheap=backtest_rank_portfolio(p, range(split + 1, n + 1)),
        split_rank=split,
    )
