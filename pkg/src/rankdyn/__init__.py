"""Rank-based estimation, prediction and simulation of dynamic power-law distributions."""

from .errors import (
    InputError,
    NonStationary,
    NoStationaryPrediction,
    RankDynError,
    StationarityError,
    StationarityViolation,
)
from .estimator import (
    EstimateSet,
    bootstrap_ci,
    estimate,
    estimate_local_times,
    gibrat_closed_form,
    observed_average_gaps,
    predict_stationary_gaps,
    smooth_and_select,
    tanaka_local_time,
)
from .panel import Panel, SharePanel, load_panel, normalize_initial, relative_prices, to_shares
from .portfolio import backtest_rank_portfolio, size_effect_summary
from .ranking import RankSharePanel, rank_permutation, ranked_view
from .simulator import (
    NameModelSpec,
    StableGapSpec,
    gaps_to_shares,
    gibrat_spec,
    simulate_name_model,
    simulate_stable_gaps,
)

__version__ = "0.1.0"
