"""Exception types raised across the package.

Each family maps onto one CLI exit code (see :mod:`rankdyn.cli`).
"""


class RankDynError(Exception):
    """Base class for every error raised by this package."""


# -- input errors (exit code 2) ------------------------------------------------


class InputError(RankDynError, ValueError):
    pass


class PanelError(InputError):
    pass


class MissingCell(PanelError):
    pass


class NonPositiveValue(PanelError):
    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"non-positive value {value!r} at period {row!r}, entity {column!r}"
        )


class DuplicatePeriod(PanelError):
    pass


class TooFewEntities(PanelError):
    pass


class TooFewPeriods(PanelError):
    pass


class InvalidSpec(InputError):
    pass


class NegativeGap(InputError):
    pass


class EmptyRankSet(InputError):
    pass


# -- stationarity errors (exit code 3) ------------------------------------------


class StationarityError(RankDynError):
    pass


class StationarityViolation(StationarityError):
    """A partial sum alpha_1 + ... + alpha_k is non-negative for some k < N."""

    def __init__(self, rank, partial_sum):
        self.rank = rank
        self.partial_sum = partial_sum
        super().__init__(
            f"no stationary distribution: alpha_1 + ... + alpha_{rank} = "
            f"{partial_sum:.6g} >= 0"
        )


class NoStationaryPrediction(StationarityError):
    pass


class NonStationary(StationarityError):
    pass
