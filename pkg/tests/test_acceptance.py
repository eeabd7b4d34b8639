"""Acceptance checks, one test per criterion.

Each test prints one PASS/FAIL line (collected again in the terminal summary)
and then asserts. Seeds and simulation settings are fixed up front; see the
README for what each check measures.
"""

import os
import time

import numpy as np
import pytest

from rankdyn.cli import main
from rankdyn.estimator import (
    EstimateSet,
    bootstrap_ci,
    estimate,
    estimate_local_times,
    gibrat_closed_form,
    local_pareto_slopes,
    observed_average_gaps,
    pair_increments,
    predict_stationary_gaps,
    smooth_and_select,
    tanaka_local_time,
)
from rankdyn.panel import load_panel, normalize_initial, to_shares
from rankdyn.portfolio import size_effect_summary
from rankdyn.ranking import ranked_view
from rankdyn.simulator import (
    StableGapSpec,
    gibrat_spec,
    simulate_name_model,
    simulate_stable_gaps,
    stationary_start,
)

from conftest import ACCEPTANCE_LINES, random_panel

COMMODITY_CSV_ENV = "RANKDYN_COMMODITY_CSV"

GIBRAT_A, GIBRAT_S2, GIBRAT_N = -0.05, 0.2, 10
MID_RANKS = slice(2, 7)  # ranks 3..7


def record(number: int, title: str, ok: bool, detail: str, elapsed: float, budget: float) -> None:
    within = elapsed <= budget
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {number:2d} [{status}] {title}: {detail}; runtime {elapsed:.2f}s (budget {budget:g}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert within, line


def _gibrat_stationary_x0():
    alpha = np.full(GIBRAT_N, GIBRAT_A)
    alpha[-1] = -(GIBRAT_N - 1) * GIBRAT_A
    return stationary_start(alpha, np.full(GIBRAT_N - 1, 2 * GIBRAT_S2))


@pytest.fixture(scope="module")
def random_panels():
    rng = np.random.default_rng(20240601)
    out = []
    for _ in range(1000):
        n = int(rng.integers(2, 21))
        t = int(rng.integers(2, 201))
        out.append(random_panel(rng, n, t, vol=float(rng.uniform(0.01, 0.5))))
    return out


def test_criterion_01_gibrat_closed_form():
    t0 = time.perf_counter()
    n = 51
    e = EstimateSet(alpha=np.full(n, -0.05), sigma2=np.full(n - 1, 0.2), kappa=np.zeros(n - 1))
    gaps = predict_stationary_gaps(e).gaps
    gap_err = float(np.abs(gaps - 1.0 / np.arange(1, n)).max())
    zipf = gibrat_closed_form(-0.05, 0.2, n)
    slope_err = max(
        abs(zipf.pareto_slope + 1.0),
        float(np.abs(local_pareto_slopes(predict_stationary_gaps(e)) + 1.0).max()),
    )
    ok = gap_err <= 1e-12 and slope_err <= 1e-12
    record(
        1,
        "Gibrat gaps 1/k and Zipf slope -1",
        ok,
        f"max gap error {gap_err:.2e}, max slope error {slope_err:.2e} (tol 1e-12)",
        time.perf_counter() - t0,
        1,
    )


def test_criterion_02_closure_identity(random_panels):
    t0 = time.perf_counter()
    worst_sum, worst_kappa = 0.0, 0.0
    for p in random_panels:
        e = estimate(ranked_view(to_shares(p)))
        worst_sum = max(worst_sum, abs(float(e.alpha.sum())))
        rel = np.abs(-2 * np.cumsum(e.alpha)[:-1] - e.kappa) / np.maximum(1.0, np.abs(e.kappa))
        worst_kappa = max(worst_kappa, float(rel.max()))
    ok = worst_sum <= 1e-10 and worst_kappa <= 1e-12
    record(
        2,
        "closure sum(alpha)=0 and kappa=-2*partial sums",
        ok,
        f"1000 panels; max |sum alpha| {worst_sum:.2e} (tol 1e-10), "
        f"max kappa mismatch {worst_kappa:.2e} (round-off tol 1e-12)",
        time.perf_counter() - t0,
        10,
    )


def _unclipped_log_ratios(r):
    """Log of (top-k sum at t+1) over (sum at t+1 of the time-t top k), recomputed
    by sorting and without clipping. Each increment is this ratio times a
    positive factor, so its sign decides the increment's sign."""
    shares = np.asarray(r.shares)
    order = np.asarray(r.order)
    nxt = shares[1:]
    top_next = np.cumsum(-np.sort(-nxt, axis=1), axis=1)[:, :-1]
    frozen_next = np.cumsum(np.take_along_axis(nxt, order[:-1], axis=1), axis=1)[:, :-1]
    return np.log(top_next) - np.log(frozen_next)


def test_criterion_03_local_time_positivity(random_panels):
    t0 = time.perf_counter()
    min_inc, min_raw, min_step = np.inf, np.inf, np.inf
    for p in random_panels:
        r = ranked_view(to_shares(p))
        _, dlt = pair_increments(r)
        lt, _ = estimate_local_times(r)
        min_inc = min(min_inc, float(dlt.min()))
        min_step = min(min_step, float(np.diff(lt.values, axis=0).min()))
        min_raw = min(min_raw, float(_unclipped_log_ratios(r).min()))
    ok = min_inc >= 0 and min_step >= 0 and min_raw >= -1e-12
    record(
        3,
        "local-time increments >= 0, paths non-decreasing",
        ok,
        f"1000 panels; min increment {min_inc:.2e}, min path step {min_step:.2e}, "
        f"min unclipped log ratio {min_raw:.2e} (round-off tol 1e-12)",
        time.perf_counter() - t0,
        10,
    )


def test_criterion_04_tanaka_oracle():
    t0 = time.perf_counter()
    errors = []
    for seed in range(20):
        out = simulate_stable_gaps(StableGapSpec(kappa=[0.5], sigma=[1.0], dt=1e-3, steps=100_000, seed=seed))
        lt, _ = estimate_local_times(ranked_view(to_shares(out.panel)))
        v = np.log(out.panel.values)
        # the rank gap is |z| for the signed entity log ratio z; its local time is twice z's
        oracle = 2.0 * tanaka_local_time(v[:, 0] - v[:, 1])
        errors.append(abs(lt.terminal[0] - oracle) / oracle)
    worst = float(max(errors))
    record(
        4,
        "local-time recursion vs Tanaka oracle",
        worst <= 0.05,
        f"20 seeds; max relative error {worst:.2e} (tol 5e-2)",
        time.perf_counter() - t0,
        30,
    )


def test_criterion_05_ergodic_mean_gap():
    t0 = time.perf_counter()
    out = simulate_stable_gaps(StableGapSpec(kappa=[0.5], sigma=[1.0], dt=1e-3, steps=100_000, seed=0))
    mean_gap = float(observed_average_gaps(ranked_view(to_shares(out.panel))).gaps[0])
    target = 1.0 / (2 * 0.5)
    rel = abs(mean_gap - target) / target
    record(
        5,
        "stable gap time average vs sigma^2/(2 kappa)",
        rel <= 0.05,
        f"seed 0; mean gap {mean_gap:.4f} vs {target:.1f}, relative error {rel:.3f} (tol 0.05)",
        time.perf_counter() - t0,
        10,
    )


def test_criterion_06_round_trip_recovery():
    t0 = time.perf_counter()
    out = simulate_name_model(gibrat_spec(n=GIBRAT_N, a=GIBRAT_A, s2=GIBRAT_S2, steps=50_000, seed=7))
    r = ranked_view(to_shares(out.panel))
    e = estimate(r)
    alpha_err = np.abs(e.alpha[MID_RANKS] - GIBRAT_A) / abs(GIBRAT_A)
    sigma_err = np.abs(e.sigma2 - np.asarray(out.truth["sigma2"])) / np.asarray(out.truth["sigma2"])
    pred = predict_stationary_gaps(e).gaps
    obs = observed_average_gaps(r).gaps
    gap_err = np.abs(pred[MID_RANKS] - obs[MID_RANKS]) / obs[MID_RANKS]
    ok = alpha_err.max() <= 0.15 and sigma_err.max() <= 0.10 and gap_err.max() <= 0.10
    record(
        6,
        "Gibrat round trip (N=10, 50,000 periods, seed 7)",
        ok,
        f"max mid-rank alpha error {alpha_err.max():.3f} (tol 0.15), "
        f"max sigma^2 error {sigma_err.max():.3f} (tol 0.10), "
        f"max mid-rank gap error {gap_err.max():.3f} (tol 0.10)",
        time.perf_counter() - t0,
        60,
    )


def test_criterion_07_bootstrap_coverage():
    t0 = time.perf_counter()
    x0 = _gibrat_stationary_x0()
    hits = []
    for seed in range(200):
        spec = gibrat_spec(n=GIBRAT_N, a=GIBRAT_A, s2=GIBRAT_S2, steps=499, seed=seed, x0=x0, burn_in=120)
        out = simulate_name_model(spec)
        ci = bootstrap_ci(to_shares(out.panel), n_resamples=500, level=0.95, seed=seed)
        truth = np.asarray(out.truth["alpha"])[MID_RANKS]
        lo, hi = ci.lower["alpha"][MID_RANKS], ci.upper["alpha"][MID_RANKS]
        hits.extend((lo <= truth) & (truth <= hi))
    coverage = float(np.mean(hits))
    record(
        7,
        "bootstrap 95% CI coverage of true alpha (200 panels, T=500, B=500)",
        0.88 <= coverage <= 0.99,
        f"coverage {coverage:.3f} over {len(hits)} (panel, rank) pairs (target [0.88, 0.99])",
        time.perf_counter() - t0,
        300,
    )


def test_criterion_08_size_effect():
    t0 = time.perf_counter()
    x0 = _gibrat_stationary_x0()
    wins = []
    for seed in range(100):
        spec = gibrat_spec(n=GIBRAT_N, a=GIBRAT_A, s2=GIBRAT_S2, steps=1200, seed=seed, x0=x0, burn_in=120)
        rep = size_effect_summary(simulate_name_model(spec).panel)
        wins.append(rep.relative_log_value[-1] > 0)
    share = float(np.mean(wins))
    record(
        8,
        "cheap half beats expensive half (100 stationary panels, 100 years monthly)",
        share > 0.95,
        f"cheap ahead at the end in {share:.2f} of runs (need > 0.95)",
        time.perf_counter() - t0,
        120,
    )


@pytest.mark.skipif(not os.environ.get(COMMODITY_CSV_ENV), reason=f"set {COMMODITY_CSV_ENV} to the commodity CSV")
def test_criterion_09_commodity_reproduction():
    t0 = time.perf_counter()
    p = normalize_initial(load_panel(os.environ[COMMODITY_CSV_ENV], frequency=12))
    r = ranked_view(to_shares(p))
    e = smooth_and_select(estimate(r), observed_average_gaps(r, drop_first=12))
    rep = size_effect_summary(p, 11)
    ci = bootstrap_ci(r, n_resamples=1000, seed=0, passes=e.smoothing_passes)
    inside = all(
        ((ci.lower[k] <= v) & (v <= ci.upper[k])).all()
        for k, v in (("alpha", e.smoothed_alpha), ("sigma", np.sqrt(e.smoothed_sigma2)))
    )
    cheap, dear = rep.cheap.avg_annual_return, rep.expensive.avg_annual_return
    ok = (
        p.n_entities == 22
        and abs(e.fit_deviation - 0.143) <= 0.05
        and abs(cheap - 0.0862) <= 0.01
        and abs(dear - 0.0225) <= 0.01
        and inside
    )
    record(
        9,
        "commodity data reproduction",
        ok,
        f"N={p.n_entities}, T={p.n_periods}, passes {e.smoothing_passes}, deviation {e.fit_deviation:.3f} "
        f"(0.143 +- 0.05), cheap {cheap:.4f} (0.0862 +- 0.01), expensive {dear:.4f} (0.0225 +- 0.01), "
        f"point estimates inside bands: {inside}",
        time.perf_counter() - t0,
        600,
    )


def _data_files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


def test_criterion_10_determinism(tmp_path):
    t0 = time.perf_counter()
    sim_args = ["simulate", "--preset", "gibrat", "--n", "6", "--steps", "400", "--seed", "7"]
    runs = {}
    for rep in ("a", "b"):
        base = tmp_path / rep
        assert main([*sim_args, "-o", str(base / "simulate")]) == 0
        panel = str(base / "simulate" / "panel.csv")
        assert main(["estimate", "-i", panel, "--smoothing", "auto", "-o", str(base / "estimate")]) == 0
        est = str(base / "estimate" / "estimates.json")
        assert main(["predict", "--estimates", est, "-i", panel, "-o", str(base / "predict")]) == 0
        assert main(["bootstrap", "-i", panel, "--resamples", "200", "-o", str(base / "bootstrap")]) == 0
        assert main(["backtest", "-i", panel, "-o", str(base / "backtest")]) == 0
        assert main(["report", "-i", panel, "--resamples", "200", "-o", str(base / "report")]) == 0
        assert main(["simulate", "--preset", "stable", "--n", "3", "--steps", "500", "-o", str(base / "stable")]) == 0
        runs[rep] = {sub.name: _data_files(sub) for sub in sorted(base.iterdir())}
    differing = [
        f"{sub}/{name}"
        for sub, files in runs["a"].items()
        for name, data in files.items()
        if runs["b"][sub].get(name) != data
    ]
    n_files = sum(len(f) for f in runs["a"].values())
    same_sets = all(set(runs["a"][s]) == set(runs["b"][s]) for s in runs["a"])
    record(
        10,
        "byte-identical reruns for every subcommand",
        not differing and same_sets,
        f"{n_files} data files compared across 7 runs, {len(differing)} differ {differing}",
        time.perf_counter() - t0,
        60,
    )
