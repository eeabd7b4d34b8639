from .bootstrap import BootstrapResult, bootstrap_ci, bootstrap_samples
from .estimates import (
    EstimateSet,
    LocalTimeSeries,
    alpha_from_kappa,
    annualize,
    estimate,
    estimate_local_times,
    estimate_sigma2,
    pair_increments,
)
from .oracle import tanaka_local_time, tanaka_path
from .smoothing import kernel_matrix, smooth, smooth_and_select, smooth_parameters
from .stationary import (
    DistributionCurve,
    GibratSolution,
    curve_deviation,
    gibrat_closed_form,
    local_pareto_slopes,
    observed_average_gaps,
    predict_gaps,
    predict_stationary_gaps,
)

__all__ = [
    "BootstrapResult",
    "DistributionCurve",
    "EstimateSet",
    "GibratSolution",
    "LocalTimeSeries",
    "alpha_from_kappa",
    "annualize",
    "bootstrap_ci",
    "bootstrap_samples",
    "curve_deviation",
    "estimate",
    "estimate_local_times",
    "estimate_sigma2",
    "gibrat_closed_form",
    "kernel_matrix",
    "local_pareto_slopes",
    "observed_average_gaps",
    "pair_increments",
    "predict_gaps",
    "predict_stationary_gaps",
    "smooth",
    "smooth_and_select",
    "smooth_parameters",
    "tanaka_local_time",
    "tanaka_path",
]
