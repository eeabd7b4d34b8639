"""Command-line entry point: ``rankdyn <subcommand> [options]``.

Every run stages its files in a hidden scratch directory inside the output
directory and moves them into place only when the whole subcommand has
succeeded, so a failed run leaves no partial outputs behind. A
``manifest.json`` with the configuration, seed, library versions and timings
is written last.

Exit codes: 0 success, 2 input error, 3 stationarity violation, 4 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import platform
import shutil
import sys
import tempfile
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InputError, StationarityError
from .estimator import (
    EstimateSet,
    bootstrap_ci,
    curve_deviation,
    estimate,
    estimate_local_times,
    local_pareto_slopes,
    observed_average_gaps,
    predict_stationary_gaps,
    smooth_and_select,
)
from .io import write_json, write_panel_csv, write_rank_csv, write_table_csv
from .panel import Panel, load_panel, normalize_initial, relative_prices, to_shares
from .portfolio import size_effect_summary
from .ranking import RankSharePanel, ranked_view
from .simulator import (
    NameModelSpec,
    StableGapSpec,
    gibrat_spec,
    simulate_name_model,
    simulate_stable_gaps,
)

__all__ = ["RunConfig", "build_parser", "main", "run"]

OUTPUT_ENV = "RANKDYN_OUTPUT_DIR"
EXIT_OK, EXIT_INPUT, EXIT_STATIONARITY, EXIT_INTERNAL = 0, 2, 3, 4
SUBCOMMANDS = ("estimate", "predict", "bootstrap", "simulate", "backtest", "report")


@dataclass
class RunConfig:
    subcommand: str
    input: Optional[str] = None
    output: Optional[str] = None
    frequency: int = 12
    format: str = "wide"
    normalize: bool = True
    resamples: int = 1000
    level: float = 0.95
    seed: int = 0
    smoothing: str = "none"
    metric: str = "log_price"
    drop_first: Optional[int] = None
    split_rank: Optional[int] = None
    estimates: Optional[str] = None
    spec: Optional[str] = None
    preset: str = "gibrat"
    n: int = 10
    steps: int = 1000
    a: float = -0.05
    s2: float = 0.2
    kappa: float = 0.5
    sigma: float = 1.0
    dt: Optional[float] = None
    substeps: int = 10
    burn_in: int = 0

    def output_dir(self) -> Path:
        return Path(self.output or os.environ.get(OUTPUT_ENV) or "out")

    def check(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise InputError(f"unknown subcommand {self.subcommand!r}")
        needs_input = {"estimate", "bootstrap", "backtest", "report"}
        if self.subcommand in needs_input and not self.input:
            raise InputError(f"{self.subcommand} needs --input")
        if self.subcommand == "predict" and not (self.input or self.estimates):
            raise InputError("predict needs --estimates, --input, or both")
        if self.frequency < 1:
            raise InputError("--frequency must be >= 1")
        if not 0 < self.level < 1:
            raise InputError("--level must lie in (0, 1)")
        if self.resamples < 1:
            raise InputError("--resamples must be >= 1")
        if self.drop_first is not None and self.drop_first < 0:
            raise InputError("--drop-first must be >= 0")
        if self.metric not in ("log_price", "gap"):
            raise InputError("--metric must be log_price or gap")
        self.smoothing_passes()

    def skipped_periods(self, n_periods: int) -> int:
        """Periods left out of the observed curve: one year by default, none for panels that short."""
        if self.drop_first is None:
            return self.frequency if n_periods > self.frequency else 0
        if self.drop_first >= n_periods:
            raise InputError(f"--drop-first {self.drop_first} leaves no periods out of {n_periods}")
        return self.drop_first

    def smoothing_passes(self):
        """None for raw estimates, "auto", or a fixed positive pass count."""
        s = str(self.smoothing).strip().lower()
        if s in ("none", "0", ""):
            return None
        if s == "auto":
            return "auto"
        try:
            m = int(s)
        except ValueError:
            raise InputError(f"--smoothing must be auto, none or an integer, got {self.smoothing!r}") from None
        if m < 0:
            raise InputError("--smoothing pass count must be non-negative")
        return m


# -- pipeline pieces ----------------------------------------------------------------


def _load(cfg: RunConfig) -> Panel:
    p = load_panel(cfg.input, frequency=cfg.frequency, format=cfg.format)
    return normalize_initial(p) if cfg.normalize else p


def _estimate(cfg: RunConfig, r: RankSharePanel) -> EstimateSet:
    e = estimate(r)
    passes = cfg.smoothing_passes()
    if passes is not None:
        observed = observed_average_gaps(r, cfg.skipped_periods(r.n_periods))
        e = smooth_and_select(e, observed, passes=passes, metric=cfg.metric)
    return e


def _write_estimates(out: Path, e: EstimateSet) -> None:
    write_json(out / "estimates.json", e.to_dict())
    ci = e.ci
    smoothed_sigma = None if e.smoothed_sigma2 is None else np.sqrt(e.smoothed_sigma2)
    for name, raw, sm in (
        ("alpha", e.alpha, e.smoothed_alpha),
        ("sigma", e.sigma, smoothed_sigma),
        ("kappa", e.kappa, e.smoothed_kappa),
    ):
        write_rank_csv(
            out / f"{name}.csv",
            {
                "estimate": raw,
                "smoothed": sm,
                "lower": None if ci is None else ci.lower[name],
                "upper": None if ci is None else ci.upper[name],
            },
        )


def _bootstrap(cfg: RunConfig, r: RankSharePanel, e: EstimateSet) -> EstimateSet:
    ci = bootstrap_ci(r, n_resamples=cfg.resamples, level=cfg.level, seed=cfg.seed, passes=e.smoothing_passes)
    return e.replace(ci=ci)


def _write_prediction(out: Path, e: EstimateSet, r: Optional[RankSharePanel], cfg: RunConfig) -> dict:
    pred = predict_stationary_gaps(e)
    obs = None
    if r is not None:
        if r.n_entities != pred.n_entities:
            raise InputError(f"estimates cover {pred.n_entities} ranks but the panel has {r.n_entities} entities")
        obs = observed_average_gaps(r, cfg.skipped_periods(r.n_periods))
    slopes = local_pareto_slopes(pred)
    write_rank_csv(
        out / "predicted.csv",
        {
            "predicted_log_relative_price": pred.log_relative_prices,
            "observed_log_relative_price": None if obs is None else obs.log_relative_prices,
            "predicted_gap": pred.gaps,
            "observed_gap": None if obs is None else obs.gaps,
            "predicted_local_slope": slopes,
        },
    )
    summary = {"metric": cfg.metric, "deviation": None, "passes": e.smoothing_passes}
    if obs is not None:
        summary["deviation"] = curve_deviation(pred, obs, cfg.metric)
    write_json(out / "prediction.json", summary)
    return summary


def _write_backtest(out: Path, p: Panel, cfg: RunConfig) -> None:
    rep = size_effect_summary(p, cfg.split_rank)
    nan = np.array([np.nan])
    write_table_csv(
        out / "portfolio.csv",
        ["period", "expensive_log_value", "cheap_log_value", "relative_log_value", "expensive_return", "cheap_return"],
        zip(
            p.times,
            rep.expensive.log_value,
            rep.cheap.log_value,
            rep.relative_log_value,
            np.concatenate([nan, rep.expensive.period_returns]),
            np.concatenate([nan, rep.cheap.period_returns]),
        ),
    )
    write_json(out / "portfolio_summary.json", rep.summary())


# -- subcommands ----------------------------------------------------------------------


def _cmd_estimate(cfg: RunConfig, out: Path) -> None:
    r = ranked_view(to_shares(_load(cfg)))
    _write_estimates(out, _estimate(cfg, r))


def _cmd_bootstrap(cfg: RunConfig, out: Path) -> None:
    r = ranked_view(to_shares(_load(cfg)))
    _write_estimates(out, _bootstrap(cfg, r, _estimate(cfg, r)))


def _cmd_predict(cfg: RunConfig, out: Path) -> None:
    r = ranked_view(to_shares(_load(cfg))) if cfg.input else None
    if cfg.estimates:
        with open(cfg.estimates, encoding="utf-8") as fh:
            try:
                e = EstimateSet.from_dict(json.load(fh))
            except (ValueError, KeyError, TypeError) as exc:
                raise InputError(f"cannot read estimates from {cfg.estimates}: {exc}") from None
    else:
        e = _estimate(cfg, r)
    _write_prediction(out, e, r, cfg)


def _cmd_backtest(cfg: RunConfig, out: Path) -> None:
    _write_backtest(out, _load(cfg), cfg)


def _cmd_report(cfg: RunConfig, out: Path) -> None:
    p = _load(cfg)
    s = to_shares(p)
    r = ranked_view(s)
    e = _bootstrap(cfg, r, _estimate(cfg, r))
    _write_estimates(out, e)
    _write_prediction(out, e, r, cfg)
    _write_backtest(out, p, cfg)
    lt, _ = estimate_local_times(r)
    gap_cols = [f"gap_{k}" for k in range(1, r.n_entities)]
    write_table_csv(out / "local_times.csv", ["period", *gap_cols], ([t, *row] for t, row in zip(r.times, lt.values)))
    rel = relative_prices(s)
    write_panel_csv(out / "relative_prices.csv", p, rel.values)


def _simulation_spec(cfg: RunConfig):
    if cfg.spec:
        with open(cfg.spec, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except ValueError as exc:
                raise InputError(f"cannot parse simulator spec {cfg.spec}: {exc}") from None
        if not isinstance(d, dict):
            raise InputError("simulator spec must be a JSON object")
        d = dict(d)
        model = d.pop("model", "name")
        d.setdefault("seed", cfg.seed)
        try:
            if model == "stable":
                return StableGapSpec(**d)
            if model == "name":
                return NameModelSpec(**d)
            if model == "gibrat":
                return gibrat_spec(**d)
        except TypeError as exc:
            raise InputError(f"bad simulator spec field: {exc}") from None
        raise InputError(f"unknown simulator model {model!r}")
    if cfg.preset == "gibrat":
        kw = {} if cfg.dt is None else {"dt": cfg.dt}
        return gibrat_spec(
            n=cfg.n, a=cfg.a, s2=cfg.s2, steps=cfg.steps, seed=cfg.seed, substeps=cfg.substeps, burn_in=cfg.burn_in, **kw
        )
    if cfg.preset == "stable":
        return StableGapSpec(
            kappa=np.full(cfg.n - 1, cfg.kappa),
            sigma=np.full(cfg.n - 1, cfg.sigma),
            dt=1e-3 if cfg.dt is None else cfg.dt,
            steps=cfg.steps,
            seed=cfg.seed,
            sample_every=cfg.substeps,
        )
    raise InputError(f"unknown preset {cfg.preset!r}")


def _cmd_simulate(cfg: RunConfig, out: Path) -> None:
    spec = _simulation_spec(cfg)
    sim = simulate_stable_gaps(spec) if isinstance(spec, StableGapSpec) else simulate_name_model(spec)
    write_panel_csv(out / "panel.csv", sim.panel)
    truth = dict(sim.truth, frequency=sim.panel.frequency)
    write_json(out / "truth.json", truth)
    gap_cols = [f"gap_{k}" for k in range(1, sim.panel.n_entities)]
    times = sim.panel.times
    write_table_csv(out / "gaps.csv", ["period", *gap_cols], ([t, *row] for t, row in zip(times, sim.gaps)))
    if sim.local_time is not None:
        write_table_csv(
            out / "true_local_times.csv", ["period", *gap_cols], ([t, *row] for t, row in zip(times, sim.local_time))
        )


COMMANDS = {
    "estimate": _cmd_estimate,
    "predict": _cmd_predict,
    "bootstrap": _cmd_bootstrap,
    "simulate": _cmd_simulate,
    "backtest": _cmd_backtest,
    "report": _cmd_report,
}


# -- orchestration ------------------------------------------------------------------


def _versions() -> dict:
    from . import __version__

    v = {"python": platform.python_version(), "rankdyn": __version__}
    for pkg in ("numpy", "pandas", "scipy", "numba"):
        try:
            v[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            v[pkg] = None
    return v


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(cfg: RunConfig) -> int:
    """Execute one subcommand; returns the process exit status."""
    started = time.perf_counter()
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    staging = None
    try:
        cfg.check()
        out = cfg.output_dir()
        out.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".rankdyn-staging-", dir=out))
        COMMANDS[cfg.subcommand](cfg, staging)
        produced = sorted(f.name for f in staging.iterdir())
        for name in produced:
            os.replace(staging / name, out / name)
        manifest = {
            "subcommand": cfg.subcommand,
            "config": dataclasses.asdict(cfg),
            "seed": cfg.seed,
            "versions": _versions(),
            "outputs": {name: _sha256(out / name) for name in produced},
            "timings": {"started_utc": stamp, "elapsed_seconds": time.perf_counter() - started},
        }
        write_json(out / "manifest.json", manifest)
        return EXIT_OK
    except (InputError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        _diagnose(exc)
        return EXIT_INPUT
    except StationarityError as exc:
        _diagnose(exc)
        return EXIT_STATIONARITY
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal-error code
        _diagnose(exc)
        return EXIT_INTERNAL
    finally:
        if staging is not None and staging.exists():
            shutil.rmtree(staging, ignore_errors=True)


def _diagnose(exc: BaseException) -> None:
    msg = str(exc).splitlines()[0] if str(exc) else ""
    print(f"rankdyn: {type(exc).__name__}: {msg}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help=f"output directory (default ${OUTPUT_ENV} or ./out)")
    common.add_argument("--seed", type=int, default=0)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("-i", "--input", help="panel CSV")
    data.add_argument("--frequency", type=int, default=12, help="periods per year")
    data.add_argument("--format", choices=("wide", "long"), default="wide")
    data.add_argument(
        "--no-normalize", dest="normalize", action="store_false", help="skip dividing each series by its first value"
    )
    data.add_argument(
        "--drop-first", type=int, default=None, help="periods skipped when averaging observed gaps (default one year)"
    )

    smoothing = argparse.ArgumentParser(add_help=False)
    smoothing.add_argument("--smoothing", default=None, help="auto, none, or a number of kernel passes")
    smoothing.add_argument("--metric", choices=("log_price", "gap"), default="log_price")

    boot = argparse.ArgumentParser(add_help=False)
    boot.add_argument("--resamples", type=int, default=1000)
    boot.add_argument("--level", type=float, default=0.95)

    split = argparse.ArgumentParser(add_help=False)
    split.add_argument("--split-rank", type=int, default=None, help="last rank of the expensive portfolio")

    parser = argparse.ArgumentParser(prog="rankdyn", description="Rank-based estimation of dynamic power laws.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("estimate", parents=[common, data, smoothing], help="point estimates by rank")
    p = sub.add_parser("predict", parents=[common, data, smoothing], help="predicted vs observed stationary curve")
    p.add_argument("--estimates", help="estimates.json from a previous run")
    sub.add_parser("bootstrap", parents=[common, data, smoothing, boot], help="estimates with confidence intervals")
    sub.add_parser("backtest", parents=[common, data, split], help="cheap vs expensive rank portfolios")
    sub.add_parser("report", parents=[common, data, smoothing, boot, split], help="every figure data file")

    s = sub.add_parser("simulate", parents=[common], help="synthetic panel with ground truth")
    s.add_argument("--preset", choices=("gibrat", "stable"), default="gibrat")
    s.add_argument("--spec", help="JSON simulator spec; overrides the preset")
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--steps", type=int, default=1000, help="sampled periods")
    s.add_argument("--a", type=float, default=-0.05, help="Gibrat relative drift per year")
    s.add_argument("--s2", type=float, default=0.2, help="Gibrat per-entity variance per year")
    s.add_argument("--kappa", type=float, default=0.5, help="stable-gap drift per year")
    s.add_argument("--sigma", type=float, default=1.0, help="stable-gap volatility per year")
    s.add_argument("--dt", type=float, default=None, help="Euler step in years")
    s.add_argument("--substeps", type=int, default=10, help="Euler steps per sampled period")
    s.add_argument("--burn-in", type=int, default=0, help="periods simulated and discarded first")
    return parser


_SMOOTHING_DEFAULT = {"predict": "auto", "report": "auto"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    kw = {k: v for k, v in vars(ns).items() if k in fields}
    if kw.get("smoothing") is None:
        kw["smoothing"] = _SMOOTHING_DEFAULT.get(ns.subcommand, "none")
    return RunConfig(**kw)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
