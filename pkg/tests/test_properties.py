import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rankdyn.estimator import (
    bootstrap_ci,
    estimate,
    estimate_local_times,
    pair_increments,
    smooth_parameters,
    tanaka_path,
)
from rankdyn.panel import Panel, normalize_initial, relative_prices, to_shares
from rankdyn.ranking import rank_order, ranked_view
from rankdyn.simulator import gaps_to_shares

log_level = st.floats(min_value=-8.0, max_value=8.0, allow_nan=False)


@st.composite
def panels(draw, max_n=8, max_t=30):
    n = draw(st.integers(2, max_n))
    t = draw(st.integers(2, max_t))
    # coarse grid so exact ties show up often
    coarse = draw(st.booleans())
    if coarse:
        logx = draw(arrays(np.float64, (t, n), elements=st.integers(-3, 3).map(float)))
    else:
        logx = draw(arrays(np.float64, (t, n), elements=log_level))
    return Panel([f"e{i}" for i in range(n)], [str(j) for j in range(t)], np.exp(logx), 12)


@settings(max_examples=150, deadline=None)
@given(panels())
def test_alpha_closes_and_partial_sums_give_kappa(p):
    e = estimate(ranked_view(to_shares(p)))
    scale = max(1.0, float(np.abs(e.kappa).max()))
    assert abs(e.alpha.sum()) <= 1e-10 * scale
    np.testing.assert_allclose(-2 * np.cumsum(e.alpha)[:-1], e.kappa, rtol=0, atol=1e-12 * scale)
    assert (e.kappa >= 0).all() and (e.sigma2 >= 0).all()


@settings(max_examples=150, deadline=None)
@given(panels())
def test_local_times_non_negative_and_non_decreasing(p):
    r = ranked_view(to_shares(p))
    _, dlt = pair_increments(r)
    assert (dlt >= 0).all()
    lt, _ = estimate_local_times(r)
    assert (lt.values[0] == 0).all()
    assert (np.diff(lt.values, axis=0) >= 0).all()


@settings(max_examples=100, deadline=None)
@given(panels(), arrays(np.float64, 30, elements=st.floats(-5, 5)))
def test_shares_ignore_common_row_scale(p, log_scale):
    scale = np.exp(log_scale[: p.n_periods])[:, None]
    a = to_shares(p).values
    b = to_shares(p.with_values(p.values * scale)).values
    np.testing.assert_allclose(a, b, rtol=1e-12)
    assert np.abs(a.sum(axis=1) - 1).max() <= 1e-12


@settings(max_examples=100, deadline=None)
@given(panels())
def test_normalize_initial_idempotent(p):
    once = normalize_initial(p)
    np.testing.assert_array_equal(once.values[0], 1.0)
    np.testing.assert_allclose(normalize_initial(once).values, once.values, rtol=1e-15)


@settings(max_examples=100, deadline=None)
@given(panels())
def test_relative_prices_keep_rank_gaps(p):
    s = to_shares(p)
    x = relative_prices(s).values
    np.testing.assert_allclose(x.mean(axis=1), 1.0, rtol=0, atol=1e-12)
    ranked = np.log(np.take_along_axis(x, rank_order(x), axis=1))
    np.testing.assert_allclose(ranked[:, :-1] - ranked[:, 1:], ranked_view(s).gaps, rtol=0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(panels(), st.floats(1e-3, 1e3))
def test_rank_order_ignores_positive_scale(p, c):
    x = np.asarray(p.values)
    # powers of two scale exactly, so ties stay ties
    c = 2.0 ** np.round(np.log2(c))
    np.testing.assert_array_equal(rank_order(x), rank_order(x * c))


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, st.integers(2, 15), elements=st.floats(-1, 1)),
    st.integers(1, 100),
)
def test_smoothing_keeps_closure_and_variance_sign(alpha, m):
    alpha = alpha - alpha.mean()
    sigma2 = np.abs(alpha[:-1]) + 0.01 if len(alpha) > 1 else np.array([0.01])
    a, s2 = smooth_parameters(alpha, sigma2, m)
    assert abs(a.sum()) < 1e-12
    assert (s2 >= 0).all()


@settings(max_examples=30, deadline=None)
@given(panels(max_n=5, max_t=20), st.integers(0, 2**32 - 1))
def test_bootstrap_bounds_ordered(p, seed):
    ci = bootstrap_ci(to_shares(p), n_resamples=25, seed=seed)
    for k in ci.lower:
        assert (ci.lower[k] <= ci.upper[k]).all()


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 20), st.integers(1, 6)), elements=st.floats(0, 5)))
def test_gap_round_trip(g):
    np.testing.assert_allclose(ranked_view(gaps_to_shares(g)).gaps, g, rtol=0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(2, 50), elements=st.floats(-3, 3)))
def test_tanaka_non_decreasing(z):
    lam = tanaka_path(z)
    assert lam[0] == 0
    assert (np.diff(lam) >= -1e-12).all()
