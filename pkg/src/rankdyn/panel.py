"""Balanced positive panels: loading, validation and share transforms."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import (
    DuplicatePeriod,
    MissingCell,
    NonPositiveValue,
    PanelError,
    TooFewEntities,
    TooFewPeriods,
)

__all__ = [
    "Panel",
    "SharePanel",
    "RelPricePanel",
    "load_panel",
    "normalize_initial",
    "to_shares",
    "relative_prices",
]

SHARE_TOL = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Panel:
    """T x N matrix of strictly positive levels x_i(t).

    Rows are periods (strictly increasing), columns are entities. Period
    labels are opaque; ``frequency`` is periods per year and only used for
    annualization.
    """

    entities: tuple[str, ...]
    times: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    frequency: int = 12

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(str(e) for e in self.entities))
        object.__setattr__(self, "times", tuple(str(t) for t in self.times))
        object.__setattr__(self, "values", _frozen(self.values))
        self._check_shape()
        if int(self.frequency) < 1:
            raise PanelError(f"frequency must be a positive integer, got {self.frequency}")
        object.__setattr__(self, "frequency", int(self.frequency))
        if len(set(self.times)) != len(self.times):
            dup = pd.Series(self.times).duplicated()
            raise DuplicatePeriod(f"duplicate period label {self.times[int(dup.idxmax())]!r}")
        if np.isnan(self.values).any():
            t, i = np.argwhere(np.isnan(self.values))[0]
            raise MissingCell(f"missing value at period {self.times[t]!r}, entity {self.entities[i]!r}")
        bad = ~(self.values > 0) | ~np.isfinite(self.values)
        if bad.any():
            t, i = np.argwhere(bad)[0]
            raise NonPositiveValue(self.times[t], self.entities[i], float(self.values[t, i]))

    def _check_shape(self):
        v = self.values
        if v.ndim != 2:
            raise PanelError("panel values must be a 2-d matrix")
        if v.shape != (len(self.times), len(self.entities)):
            raise PanelError(
                f"values shape {v.shape} does not match "
                f"{len(self.times)} periods x {len(self.entities)} entities"
            )
        if v.shape[1] < 2:
            raise TooFewEntities(f"need at least 2 entities, got {v.shape[1]}")
        if v.shape[0] < 2:
            raise TooFewPeriods(f"need at least 2 periods, got {v.shape[0]}")

    @property
    def n_entities(self) -> int:
        return self.values.shape[1]

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    def with_values(self, values) -> "Panel":
        return Panel(self.entities, self.times, values, self.frequency)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(np.asarray(self.values), index=list(self.times), columns=list(self.entities))


@dataclass(frozen=True)
class SharePanel:
    """Cross-sectional shares theta_i(t) = x_i(t) / sum_j x_j(t)."""

    entities: tuple[str, ...]
    times: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    frequency: int = 12

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(str(e) for e in self.entities))
        object.__setattr__(self, "times", tuple(str(t) for t in self.times))
        object.__setattr__(self, "values", _frozen(self.values))
        Panel._check_shape(self)
        v = self.values
        if not ((v > 0) & (v < 1)).all():
            raise PanelError("shares must lie strictly inside (0, 1)")
        err = np.abs(v.sum(axis=1) - 1.0).max()
        if err > SHARE_TOL:
            raise PanelError(f"share rows must sum to 1 (max error {err:.3g})")

    @property
    def n_entities(self) -> int:
        return self.values.shape[1]

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class RelPricePanel:
    """Relative prices N * theta_i(t): each entity's level over the cross-sectional mean."""

    entities: tuple[str, ...]
    times: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    frequency: int = 12

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        Panel._check_shape(self)
        err = np.abs(self.values.mean(axis=1) - 1.0).max()
        if err > SHARE_TOL:
            raise PanelError(f"relative price rows must average to 1 (max error {err:.3g})")


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    # Division alone can leave row sums a few ulps off; one correction pass
    # brings them within 1e-15 for any realistic N.
    s = x / x.sum(axis=1, keepdims=True)
    return s / s.sum(axis=1, keepdims=True)


def _period_order(labels: Sequence[str]) -> list[int]:
    nums = pd.to_numeric(pd.Series(labels), errors="coerce")
    if nums.notna().all():
        key = nums.to_numpy()
    else:
        key = np.array(labels, dtype=object)
    return sorted(range(len(labels)), key=lambda j: key[j])


def load_panel(source, frequency: int = 12, format: str = "wide") -> Panel:
    """Read a balanced panel from CSV text.

    ``source`` may be a path, a file object or a string holding CSV text.
    Wide format: first column is the period label and every other column is
    one entity. Long format: columns ``period,entity,value``.

    Rows are sorted by period: numerically if every label parses as a
    number, lexicographically otherwise (ISO dates sort correctly).
    """
    if isinstance(source, (str, os.PathLike)) and not (isinstance(source, str) and "\n" in source):
        df = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    elif isinstance(source, str):
        df = pd.read_csv(io.StringIO(source), dtype=str, keep_default_na=False, skipinitialspace=True)
    else:
        df = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)

    if format == "long":
        df = _long_to_wide(df)
    elif format != "wide":
        raise PanelError(f"unknown panel format {format!r}")

    if df.shape[1] < 2:
        raise TooFewEntities("need a period column and at least 2 entity columns")
    periods = [p.strip() for p in df.iloc[:, 0].tolist()]
    entities = [str(c).strip() for c in df.columns[1:]]
    if len(set(periods)) != len(periods):
        seen = set()
        for p in periods:
            if p in seen:
                raise DuplicatePeriod(f"duplicate period label {p!r}")
            seen.add(p)
    if len(entities) < 2:
        raise TooFewEntities(f"need at least 2 entities, got {len(entities)}")
    if len(periods) < 2:
        raise TooFewPeriods(f"need at least 2 periods, got {len(periods)}")

    raw = df.iloc[:, 1:]
    values = np.empty(raw.shape)
    for j, col in enumerate(raw.columns):
        for r, cell in enumerate(raw[col].tolist()):
            cell = cell.strip() if isinstance(cell, str) else cell
            if cell == "" or cell is None:
                raise MissingCell(f"missing value at period {periods[r]!r}, entity {entities[j]!r}")
            try:
                v = float(cell)
            except ValueError:
                raise PanelError(
                    f"non-numeric value {cell!r} at period {periods[r]!r}, entity {entities[j]!r}"
                ) from None
            if np.isnan(v):
                raise MissingCell(f"missing value at period {periods[r]!r}, entity {entities[j]!r}")
            if not v > 0 or not np.isfinite(v):
                raise NonPositiveValue(periods[r], entities[j], v)
            values[r, j] = v

    order = _period_order(periods)
    return Panel(
        entities=tuple(entities),
        times=tuple(periods[j] for j in order),
        values=values[order],
        frequency=frequency,
    )


def _long_to_wide(df: pd.DataFrame) -> pd.DataFrame:
    cols = [c.strip().lower() for c in df.columns]
    if cols[:3] != ["period", "entity", "value"]:
        raise PanelError("long format needs columns period,entity,value")
    df = df.iloc[:, :3].copy()
    df.columns = ["period", "entity", "value"]
    df["period"] = df["period"].str.strip()
    df["entity"] = df["entity"].str.strip()
    dup = df.duplicated(["period", "entity"])
    if dup.any():
        row = df[dup].iloc[0]
        raise DuplicatePeriod(f"duplicate entry for period {row.period!r}, entity {row.entity!r}")
    periods = list(dict.fromkeys(df["period"]))
    entities = list(dict.fromkeys(df["entity"]))
    wide = df.pivot(index="period", columns="entity", values="value").reindex(index=periods, columns=entities)
    if wide.isna().any().any():
        r, c = np.argwhere(wide.isna().to_numpy())[0]
        raise MissingCell(f"missing value at period {periods[r]!r}, entity {entities[c]!r}")
    wide = wide.reset_index()
    wide.columns = ["period"] + entities
    return wide


def normalize_initial(p: Panel) -> Panel:
    """Divide every series by its own first value so that row 0 is all ones."""
    v = np.asarray(p.values)
    return p.with_values(v / v[0])


def to_shares(p: Panel) -> SharePanel:
    return SharePanel(p.entities, p.times, _normalize_rows(np.asarray(p.values)), p.frequency)


def relative_prices(s: SharePanel) -> RelPricePanel:
    n = s.n_entities
    return RelPricePanel(s.entities, s.times, n * np.asarray(s.values), s.frequency)
