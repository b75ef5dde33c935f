"""Experiment orchestration: scenario x method x grid runs over seeded
replications, aggregated into normalized risk tables.

Replications are driven sequentially but are fully independent: each one
owns its generator stream and its own combiner instances, results are keyed
by replication index, and reruns with the same config are bit-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .combiners import (
    Combiner,
    ExponentialReweighting,
    InverseMseWeighting,
    LinearRegressionCombiner,
    Rolling,
    SimpleAverage,
)
from .core import EvaluationWindow, ForecastPanel, msfe, normalize_vs_baseline
from .dgp import (
    ALL_SCENARIOS,
    CASE_SCENARIOS,
    BreakConfig,
    ScenarioConfig,
    ScreeningConfig,
    beta_for_sn,
    generate_breaks,
    generate_case,
    sn_grid,
)
from .errors import ConfigError, ReplicationError
from .mafter import MultiLevelCombiner
from .numerics import SeededGenerator
from .screening import generate_screening, retain_top, screen_models, subset_forecasts

BASELINE_METHOD = "sa"
KNOWN_METHODS = ("sa", "bg", "linreg", "after", "mafter")


def build_method(
    name: str,
    prior_variance: float = 1.0,
    rolling_window: int | None = None,
) -> Combiner:
    """Construct a combiner by its method name, optionally rolling-wrapped.

    The simple average carries no estimated state, so wrapping it in a
    rolling window would be a no-op and is skipped.
    """
    if name == "sa":
        inner: Combiner = SimpleAverage()
    elif name == "bg":
        inner = InverseMseWeighting()
    elif name == "linreg":
        inner = LinearRegressionCombiner()
    elif name == "after":
        inner = ExponentialReweighting(prior_variance=prior_variance)
    elif name == "mafter":
        inner = MultiLevelCombiner(prior_variance=prior_variance)
    else:
        raise ConfigError(f"unknown method {name!r}; known: {KNOWN_METHODS}")
    if rolling_window is not None and name != "sa":
        return Rolling(inner, rolling_window)
    return inner


def panel_prior_variance(panel: ForecastPanel) -> float:
    """Variance prior from the realized values preceding the combine span;
    falls back to 1 when no presample is attached."""
    ps = panel.presample_y
    if ps is None or ps.size < 2:
        return 1.0
    v = float(np.var(ps, ddof=1))
    return v if v > 0.0 else 1.0


def run_combiner(
    panel: ForecastPanel,
    combiner: Combiner,
    window: EvaluationWindow | None = None,
) -> np.ndarray:
    """Drive a combiner through the protocol and return its predictions.

    Predictions are produced for every panel time at or after the window's
    combine start (the whole panel when no window is given).
    """
    cand = panel.candidate_matrix()
    start = window.combine_start if window is not None else panel.times[0]
    preds = np.full(panel.n_times, np.nan)
    for i in range(panel.n_times):
        if panel.times[i] < start:
            continue
        preds[i] = combiner.predict(cand[i])
        combiner.observe(float(panel.y[i]))
    return preds


def _drive_msfe(panel: ForecastPanel, combiner: Combiner, window: EvaluationWindow) -> float:
    preds = run_combiner(panel, combiner, window)
    mask = panel.times >= window.combine_start
    return msfe(panel.y[mask], preds[mask], window, times=panel.times[mask])


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a scenario, a method list, a grid and a seed.

    The grid dimension depends on the scenario: signal-to-noise points for
    the regression cases, rolling-window sizes for ``breaks``, retention
    percentages for ``screening``.  The simple average is always included
    as the normalization baseline.
    """

    scenario: str
    methods: tuple[str, ...] = ("sa", "bg", "after", "linreg")
    rolling_windows: tuple[int | None, ...] = (None,)
    n_reps: int = 100
    seed: int = 0
    sn_points: tuple[float, ...] | None = None
    x_percents: tuple[int, ...] = (10, 20, 40, 60, 80)
    sigma: float | None = None
    sigma_x: float = 1.0
    rho: float = 0.0
    T: int | None = None
    stationarity_policy: str = "reject_nonstationary"
    screening_strategy: str = "stepwise"
    frozen_coefficients: bool = False

    def __post_init__(self) -> None:
        if self.scenario not in ALL_SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; known: {ALL_SCENARIOS}")
        methods = tuple(self.methods)
        for m in methods:
            if m not in KNOWN_METHODS:
                raise ConfigError(f"unknown method {m!r}; known: {KNOWN_METHODS}")
        if BASELINE_METHOD not in methods:
            methods = (BASELINE_METHOD,) + methods
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "rolling_windows", tuple(self.rolling_windows))
        for rw in self.rolling_windows:
            if rw is not None and rw < 2:
                raise ConfigError(f"rolling window must be >= 2, got {rw}")
        if not self.rolling_windows:
            raise ConfigError("need at least one rolling-window entry (None = expanding)")
        if self.n_reps < 1:
            raise ConfigError("n_reps must be >= 1")
        if self.sn_points is not None:
            object.__setattr__(self, "sn_points", tuple(float(s) for s in self.sn_points))
            if not self.sn_points:
                raise ConfigError("signal-to-noise grid must be non-empty")
        if not self.x_percents:
            raise ConfigError("retention grid must be non-empty")

    @property
    def effective_sigma(self) -> float:
        if self.sigma is not None:
            return self.sigma
        return 2.0 if self.scenario == "screening" else 1.0


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    grid: str
    method: str
    point: float
    se: float
    n_reps: int


@dataclass
class ResultTable:
    """Normalized risk results plus the metadata that makes them
    self-describing (seed, version, deviation flags)."""

    rows: list[ResultRow]
    metadata: dict[str, str] = field(default_factory=dict)

    def get(self, method: str, grid: str) -> ResultRow:
        for row in self.rows:
            if row.method == method and row.grid == grid:
                return row
        raise KeyError(f"no row for method={method!r}, grid={grid!r}")

    def grids(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.grid not in seen:
                seen.append(row.grid)
        return seen

    def points(self, method: str) -> list[tuple[str, float, float]]:
        """(grid, point, se) for one method, in grid order."""
        return [(r.grid, r.point, r.se) for r in self.rows if r.method == method]


def grid_label(value: float | int | str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def _base_metadata(config: ExperimentConfig) -> dict[str, str]:
    return {
        "scenario": config.scenario,
        "seed": str(config.seed),
        "n_reps": str(config.n_reps),
        "version": __version__,
    }


def replication_msfes(
    scenario_config,
    methods: Sequence[str],
    n_reps: int,
    seed: int,
    rolling_window: int | None = None,
    generate=generate_case,
) -> dict[str, list[float]]:
    """Per-replication MSFEs of each method on a fixed scenario config.

    The building block under :func:`run_experiment`, exposed for analyses
    that need raw (un-normalized) losses such as the candidate-pool
    robustness ratios.
    """
    master = SeededGenerator(seed)
    window = scenario_config.window()
    out: dict[str, list[float]] = {m: [] for m in methods}
    for rep in range(n_reps):
        try:
            panel = generate(scenario_config, master.for_replication(rep))
            prior = panel_prior_variance(panel)
            for m in methods:
                combiner = build_method(m, prior_variance=prior, rolling_window=rolling_window)
                out[m].append(_drive_msfe(panel, combiner, window))
        except Exception as exc:  # abort with the replication pinpointed
            raise ReplicationError(f"replication {rep} failed (seed {seed}): {exc}") from exc
    return out


def _run_case_experiment(config: ExperimentConfig) -> ResultTable:
    points = config.sn_points if config.sn_points is not None else tuple(sn_grid())
    sigma = config.effective_sigma
    rows: list[ResultRow] = []
    for sn in points:
        scfg = ScenarioConfig(
            scenario=config.scenario,
            beta=beta_for_sn(sn, sigma, config.sigma_x),
            sigma=sigma,
            sigma_x=config.sigma_x,
            rho=config.rho,
            T=config.T if config.T is not None else 100,
            frozen_coefficients=config.frozen_coefficients,
        )
        msfes = replication_msfes(scfg, config.methods, config.n_reps, config.seed)
        for report in normalize_vs_baseline(msfes, BASELINE_METHOD):
            rows.append(
                ResultRow(config.scenario, grid_label(sn), report.method, report.point, report.se, report.n_reps)
            )
    meta = _base_metadata(config)
    meta["grid"] = "signal_to_noise"
    if config.frozen_coefficients:
        meta["deviation_frozen_coefficients"] = "true"
    return ResultTable(rows=rows, metadata=meta)


def _run_breaks_experiment(config: ExperimentConfig) -> ResultTable:
    bcfg = BreakConfig(stationarity_policy=config.stationarity_policy)
    window = bcfg.window()
    master = SeededGenerator(config.seed)
    msfes: dict[tuple[int | None, str], list[float]] = {
        (rw, m): [] for rw in config.rolling_windows for m in config.methods
    }
    for rep in range(config.n_reps):
        try:
            panel = generate_breaks(bcfg, master.for_replication(rep))
            prior = panel_prior_variance(panel)
            sa_cache: float | None = None
            for rw in config.rolling_windows:
                for m in config.methods:
                    if m == "sa" and sa_cache is not None:
                        msfes[(rw, m)].append(sa_cache)
                        continue
                    combiner = build_method(m, prior_variance=prior, rolling_window=rw)
                    value = _drive_msfe(panel, combiner, window)
                    msfes[(rw, m)].append(value)
                    if m == "sa":
                        sa_cache = value
        except Exception as exc:
            raise ReplicationError(f"replication {rep} failed (seed {config.seed}): {exc}") from exc

    rows: list[ResultRow] = []
    for rw in config.rolling_windows:
        label = "standard" if rw is None else f"rw={rw}"
        per_rw = {m: msfes[(rw, m)] for m in config.methods}
        for report in normalize_vs_baseline(per_rw, BASELINE_METHOD):
            rows.append(ResultRow("breaks", label, report.method, report.point, report.se, report.n_reps))
    meta = _base_metadata(config)
    meta["grid"] = "rolling_window"
    meta["stationarity_policy"] = config.stationarity_policy
    return ResultTable(rows=rows, metadata=meta)


def _run_screening_experiment(config: ExperimentConfig) -> ResultTable:
    scfg = ScreeningConfig(sigma=config.effective_sigma, rho=config.rho)
    window = scfg.window()
    master = SeededGenerator(config.seed)
    x_levels = tuple(config.x_percents)
    msfes: dict[tuple[int, str], list[float]] = {(x, m): [] for x in x_levels for m in config.methods}
    times = np.arange(scfg.screen_end + 1, scfg.T + 1)
    for rep in range(config.n_reps):
        try:
            gen = master.for_replication(rep)
            X, y = generate_screening(scfg, gen)
            models = screen_models(
                X[: scfg.screen_end], y[: scfg.screen_end], strategy=config.screening_strategy
            )
            widest = retain_top(models, max(x_levels))
            F = subset_forecasts(X, y, widest, start=scfg.screen_end)
            prior = float(np.var(y[: scfg.screen_end], ddof=1))
            for x in x_levels:
                k = len(retain_top(models, x))  # nested: prefix of the widest set
                panel = ForecastPanel(
                    times=times,
                    y=y[scfg.screen_end :],
                    forecasts={f"f{j + 1}": F[:, j] for j in range(k)},
                    presample_y=y[: scfg.screen_end],
                )
                for m in config.methods:
                    combiner = build_method(m, prior_variance=prior)
                    msfes[(x, m)].append(_drive_msfe(panel, combiner, window))
        except Exception as exc:
            raise ReplicationError(f"replication {rep} failed (seed {config.seed}): {exc}") from exc

    rows: list[ResultRow] = []
    for x in x_levels:
        per_x = {m: msfes[(x, m)] for m in config.methods}
        for report in normalize_vs_baseline(per_x, BASELINE_METHOD):
            rows.append(ResultRow("screening", f"X={x}", report.method, report.point, report.se, report.n_reps))
    meta = _base_metadata(config)
    meta["grid"] = "retention_percent"
    meta["sigma"] = grid_label(scfg.sigma)
    meta["rho"] = grid_label(scfg.rho)
    meta["screening_strategy"] = config.screening_strategy
    return ResultTable(rows=rows, metadata=meta)


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Run a full scenario x method x grid experiment.

    Deterministic given the config: replication ``i`` always uses stream
    ``(seed, i)``, and no combiner shares state across methods or
    replications.
    """
    if config.scenario in CASE_SCENARIOS:
        return _run_case_experiment(config)
    if config.scenario == "breaks":
        return _run_breaks_experiment(config)
    if config.scenario == "screening":
        return _run_screening_experiment(config)
    raise ConfigError(f"unknown scenario {config.scenario!r}")


def run_panel_eval(
    panels: ForecastPanel | Sequence[ForecastPanel],
    methods: Sequence[str] = ("sa", "bg", "linreg", "after", "mafter"),
    warmup_fraction: float = 0.25,
) -> ResultTable:
    """Evaluate combination methods on external forecast panels.

    Combiners build their weights over the first ``warmup_fraction`` of
    each panel and the MSFE is computed on the remainder, normalized
    against the simple average.  With several (horizon-labeled) panels an
    across-horizon average row is added per method.
    """
    if isinstance(panels, ForecastPanel):
        panels = [panels]
    panels = list(panels)
    if not panels:
        raise ConfigError("no panels supplied")
    if not 0.0 < warmup_fraction < 1.0:
        raise ConfigError("warmup_fraction must lie in (0, 1)")
    methods = tuple(methods)
    if BASELINE_METHOD not in methods:
        methods = (BASELINE_METHOD,) + methods

    rows: list[ResultRow] = []
    by_method: dict[str, list[float]] = {m: [] for m in methods}
    for i, panel in enumerate(panels):
        T = panel.n_times
        if T < 8:
            raise ConfigError(f"panel {i} too short for evaluation (T={T} < 8)")
        warm = math.ceil(T * warmup_fraction)
        if warm >= T:
            raise ConfigError("warm-up consumes the whole panel")
        window = EvaluationWindow(
            combine_start=int(panel.times[0]),
            eval_start=int(panel.times[warm]),
            eval_end=int(panel.times[-1]),
        )
        prior = panel_prior_variance(panel)
        msfes = {m: [_drive_msfe(panel, build_method(m, prior_variance=prior), window)] for m in methods}
        label = f"h{panel.horizon_label}" if panel.horizon_label is not None else f"panel{i + 1}"
        for report in normalize_vs_baseline(msfes, BASELINE_METHOD):
            rows.append(ResultRow("panel", label, report.method, report.point, report.se, report.n_reps))
            by_method[report.method].append(report.point)

    if len(panels) > 1:
        for report in normalize_vs_baseline(by_method, BASELINE_METHOD):
            rows.append(ResultRow("panel", "avg", report.method, report.point, report.se, report.n_reps))
    meta = {"scenario": "panel", "version": __version__, "warmup_fraction": grid_label(warmup_fraction)}
    return ResultTable(rows=rows, metadata=meta)
