"""Seeded data-generating processes and candidate-forecast constructors.

Three families:

* ``case1`` .. ``case5`` -- regression DGPs where each candidate forecast
  is a recursively re-estimated one-regressor least squares model.
* ``breaks`` -- a three-segment autoregression whose dynamics change at
  fixed break points, with AR(1)..AR(6) candidates refit on an expanding
  window.
* ``screening`` -- a sparse 20-variable linear model emitting raw (X, y)
  data for the subset-screening pipeline.

All generation is deterministic given a :class:`SeededGenerator`; component
substreams are derived so that adding a third candidate (cases 3-5) leaves
the first two candidates bit-identical to case 2 under the same seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import EvaluationWindow, ForecastPanel
from .errors import ConfigError, ExplosiveSeriesError
from .numerics import SeededGenerator, ols

CASE_SCENARIOS = ("case1", "case2", "case3", "case4", "case5")
ALL_SCENARIOS = CASE_SCENARIOS + ("breaks", "screening")

# substream tags: keep stable, they define the reproducibility contract
_STREAM_REGRESSORS = 1
_STREAM_NOISE = 2
_STREAM_EXTRA = 3


def sn_grid(n_points: int = 20, low: float = 0.05, high: float = 5.0) -> np.ndarray:
    """Signal-to-noise grid, evenly spaced on the log scale."""
    if n_points < 1 or not (0.0 < low <= high):
        raise ConfigError("need n_points >= 1 and 0 < low <= high")
    return np.logspace(math.log10(low), math.log10(high), n_points)


def beta_for_sn(sn: float, sigma: float = 1.0, sigma_x: float = 1.0) -> float:
    """Slope giving signal-to-noise ratio ``sn = beta^2 sigma_x^2 / sigma^2``."""
    if sn < 0:
        raise ConfigError("signal-to-noise ratio must be >= 0")
    return math.sqrt(sn) * sigma / sigma_x


@dataclass(frozen=True)
class ScenarioConfig:
    """Configuration for the regression cases.

    Split defaults follow the evaluation protocol: candidate models build on
    ``t <= build_end`` (0.6 T), combined forecasts run from ``combine_start``
    (build_end + 1), and the loss average starts at ``eval_start`` (0.8 T + 1).
    """

    scenario: str
    beta: float
    sigma: float = 1.0
    sigma_x: float = 1.0
    rho: float = 0.0
    T: int = 100
    build_end: int | None = None
    combine_start: int | None = None
    eval_start: int | None = None
    frozen_coefficients: bool = False

    def __post_init__(self) -> None:
        if self.scenario not in CASE_SCENARIOS:
            raise ConfigError(f"unknown case scenario: {self.scenario!r}")
        if not (self.sigma > 0 and self.sigma_x > 0):
            raise ConfigError("sigma and sigma_x must be positive")
        if abs(self.rho) > 1:
            raise ConfigError("rho must lie in [-1, 1]")
        if self.T < 10:
            raise ConfigError("horizon too short; need T >= 10")
        build_end = self.build_end if self.build_end is not None else (6 * self.T) // 10
        combine_start = self.combine_start if self.combine_start is not None else build_end + 1
        eval_start = self.eval_start if self.eval_start is not None else (8 * self.T) // 10 + 1
        object.__setattr__(self, "build_end", build_end)
        object.__setattr__(self, "combine_start", combine_start)
        object.__setattr__(self, "eval_start", eval_start)
        if not (1 <= build_end < combine_start <= eval_start <= self.T):
            raise ConfigError("splits must satisfy 1 <= build_end < combine_start <= eval_start <= T")

    def window(self) -> EvaluationWindow:
        return EvaluationWindow(self.combine_start, self.eval_start, self.T)

    def signal_to_noise(self) -> float:
        return self.beta**2 * self.sigma_x**2 / self.sigma**2


def _recursive_slope_forecasts(
    x: np.ndarray, y: np.ndarray, first: int, frozen_at: int | None = None
) -> np.ndarray:
    """One-regressor forecasts ``x_t * bhat_t`` for 0-based positions >= first.

    ``bhat_t`` is the no-intercept least squares slope on rows ``0..t-1``;
    with ``frozen_at`` set, the slope estimated from the first ``frozen_at``
    rows is reused at every forecast time.
    """
    sxy = np.cumsum(x * y)
    sxx = np.cumsum(x * x)
    if frozen_at is not None:
        slope = sxy[frozen_at - 1] / sxx[frozen_at - 1]
        return x[first:] * slope
    slopes = sxy[first - 1 : -1] / sxx[first - 1 : -1]
    return x[first:] * slopes


def _recursive_mean_forecasts(
    y: np.ndarray, first: int, frozen_at: int | None = None
) -> np.ndarray:
    """Intercept-only forecasts: mean of ``y`` over rows ``0..t-1``."""
    sy = np.cumsum(y)
    if frozen_at is not None:
        return np.full(y.size - first, sy[frozen_at - 1] / frozen_at)
    counts = np.arange(first, y.size)
    return sy[first - 1 : -1] / counts


def generate_case(config: ScenarioConfig, gen: SeededGenerator) -> ForecastPanel:
    """Simulate one replication of a regression case.

    The panel covers the combine span only; realized values from before it
    are attached as ``presample_y``.
    """
    T = config.T
    rng_x = gen.spawn(_STREAM_REGRESSORS).rng()
    rng_e = gen.spawn(_STREAM_NOISE).rng()
    eps_scale = config.sigma
    first = config.combine_start - 1  # 0-based position of the first forecast
    frozen = config.build_end if config.frozen_coefficients else None

    if config.scenario == "case1":
        x = rng_x.normal(0.0, config.sigma_x, T)
        eps = rng_e.normal(0.0, eps_scale, T)
        y = config.beta * x + eps
        forecasts = {
            "f1": _recursive_slope_forecasts(x, y, first, frozen),
            "f2": _recursive_mean_forecasts(y, first, frozen),
        }
    else:
        z = rng_x.standard_normal((T, 2))
        x1 = config.sigma_x * z[:, 0]
        x2 = config.sigma_x * (config.rho * z[:, 0] + math.sqrt(1.0 - config.rho**2) * z[:, 1])
        eps = rng_e.normal(0.0, eps_scale, T)
        y = config.beta * (x1 + x2) + eps
        forecasts = {
            "f1": _recursive_slope_forecasts(x1, y, first, frozen),
            "f2": _recursive_slope_forecasts(x2, y, first, frozen),
        }
        if config.scenario == "case3":
            x3 = gen.spawn(_STREAM_EXTRA).rng().normal(0.0, config.sigma_x, T)
            forecasts["f3"] = _recursive_slope_forecasts(x3, y, first, frozen)
        elif config.scenario == "case4":
            forecasts["f3"] = forecasts["f2"].copy()
        elif config.scenario == "case5":
            forecasts["f3"] = _recursive_slope_forecasts(np.exp(x2), y, first, frozen)

    return ForecastPanel(
        times=np.arange(config.combine_start, T + 1),
        y=y[first:],
        forecasts=forecasts,
        presample_y=y[:first],
    )


@dataclass(frozen=True)
class BreakConfig:
    """Piecewise autoregression with fixed break points.

    Segment ``j`` runs up to ``segment_bounds[j]`` and follows an AR of
    order ``lag_orders[j]`` with coefficients drawn uniformly on (0, 1).
    Uniform AR(4) coefficients are usually explosive, so the default policy
    redraws each segment's coefficients until the AR polynomial is
    stationary; ``verbatim`` keeps the raw draws and raises only if the
    simulated series exceeds ``magnitude_guard``.
    """

    segment_bounds: tuple[int, ...] = (50, 100, 150)
    lag_orders: tuple[int, ...] = (4, 2, 1)
    sigma: float = 1.0
    stationarity_policy: str = "reject_nonstationary"
    max_candidate_lag: int = 6
    forecast_start: int = 21
    eval_start: int = 51
    magnitude_guard: float = 1e12

    def __post_init__(self) -> None:
        if len(self.segment_bounds) != len(self.lag_orders) or not self.segment_bounds:
            raise ConfigError("need one lag order per segment")
        if any(b <= a for a, b in zip((0,) + self.segment_bounds, self.segment_bounds)):
            raise ConfigError("segment bounds must be strictly increasing")
        if self.stationarity_policy not in ("reject_nonstationary", "verbatim"):
            raise ConfigError(f"unknown stationarity policy: {self.stationarity_policy!r}")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if self.max_candidate_lag < 1:
            raise ConfigError("need at least one candidate lag")
        if not (self.max_candidate_lag < self.forecast_start <= self.eval_start <= self.T):
            raise ConfigError("need max_candidate_lag < forecast_start <= eval_start <= T")

    @property
    def T(self) -> int:
        return self.segment_bounds[-1]

    def window(self) -> EvaluationWindow:
        return EvaluationWindow(self.forecast_start, self.eval_start, self.T)


def ar_is_stationary(coeffs: Sequence[float]) -> bool:
    """True iff the AR polynomial ``1 - sum b_k z^k`` has all roots outside
    the unit circle (companion-matrix eigenvalues strictly inside)."""
    b = np.asarray(coeffs, dtype=float)
    k = b.size
    if k == 1:
        return abs(b[0]) < 1.0
    comp = np.zeros((k, k))
    comp[0, :] = b
    comp[1:, :-1] = np.eye(k - 1)
    return bool(np.max(np.abs(np.linalg.eigvals(comp))) < 1.0)


def draw_break_coefficients(config: BreakConfig, rng: np.random.Generator) -> list[np.ndarray]:
    """Per-segment AR coefficients under the configured stationarity policy."""
    coeffs = []
    for lag in config.lag_orders:
        while True:
            b = rng.uniform(0.0, 1.0, lag)
            if config.stationarity_policy == "verbatim" or ar_is_stationary(b):
                coeffs.append(b)
                break
    return coeffs


def _lag_matrix(y: np.ndarray, max_lag: int) -> np.ndarray:
    """L[t, j] = y[t - 1 - j]; rows below ``max_lag`` are only partially valid."""
    T = y.size
    L = np.zeros((T, max_lag))
    for j in range(max_lag):
        L[j + 1 :, j] = y[: T - j - 1]
    return L


def generate_breaks(config: BreakConfig, gen: SeededGenerator) -> ForecastPanel:
    """Simulate the break DGP and build AR(1)..AR(max_lag) candidates.

    Each candidate AR(k) is refit at every forecast time by no-intercept
    least squares on all usable rows up to t-1 (expanding window).
    """
    T = config.T
    rng_coef = gen.spawn(_STREAM_REGRESSORS).rng()
    rng_eps = gen.spawn(_STREAM_NOISE).rng()
    coeffs = draw_break_coefficients(config, rng_coef)
    eps = rng_eps.normal(0.0, config.sigma, T)

    y = np.zeros(T)
    seg = 0
    for t in range(T):
        if t + 1 > config.segment_bounds[seg]:
            seg += 1
        b = coeffs[seg]
        acc = eps[t]
        for j, bj in enumerate(b):
            if t - 1 - j >= 0:
                acc += bj * y[t - 1 - j]
        y[t] = acc
        if abs(y[t]) > config.magnitude_guard:
            raise ExplosiveSeriesError(
                f"series exceeded magnitude guard at t={t + 1} (policy={config.stationarity_policy})"
            )

    max_lag = config.max_candidate_lag
    L = _lag_matrix(y, max_lag)
    first = config.forecast_start - 1  # 0-based
    n_fc = T - first
    F = np.empty((n_fc, max_lag))
    for k in range(1, max_lag + 1):
        for i, t in enumerate(range(first, T)):
            A = L[k:t, :k]  # rows s=k..t-1 have all k lags observed
            fit = ols(A, y[k:t], intercept=False)
            F[i, k - 1] = float(L[t, :k] @ fit.coefficients)

    return ForecastPanel(
        times=np.arange(config.forecast_start, T + 1),
        y=y[first:],
        forecasts={f"ar{k}": F[:, k - 1] for k in range(1, max_lag + 1)},
        presample_y=y[:first],
    )


def _default_screening_beta(p: int) -> tuple[float, ...]:
    head = (3.0, 3.0, 2.0, 1.0, 1.0, 1.0, 1.0)
    if p < len(head):
        raise ConfigError(f"screening needs p >= {len(head)}")
    return head + (0.0,) * (p - len(head))


@dataclass(frozen=True)
class ScreeningConfig:
    """Sparse linear DGP feeding the subset-screening pipeline.

    Only the first seven coefficients are active; regressors have an AR(1)
    correlation structure ``cov[i, j] = rho^{|i-j|}``.
    """

    p: int = 20
    rho: float = 0.0
    sigma: float = 2.0
    T: int = 200
    screen_end: int = 100
    eval_start: int = 151
    beta: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.beta:
            object.__setattr__(self, "beta", _default_screening_beta(self.p))
        if len(self.beta) != self.p:
            raise ConfigError("beta must have one entry per regressor")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if abs(self.rho) >= 1:
            raise ConfigError("rho must lie in (-1, 1)")
        if not (self.p < self.screen_end < self.eval_start <= self.T):
            raise ConfigError("need p < screen_end < eval_start <= T")

    def window(self) -> EvaluationWindow:
        return EvaluationWindow(self.screen_end + 1, self.eval_start, self.T)


def generate_screening(config: ScreeningConfig, gen: SeededGenerator) -> tuple[np.ndarray, np.ndarray]:
    """Raw regression data (X, y) for the screening experiment."""
    rng_x = gen.spawn(_STREAM_REGRESSORS).rng()
    rng_e = gen.spawn(_STREAM_NOISE).rng()
    p = config.p
    cov = config.rho ** np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    chol = np.linalg.cholesky(cov)
    X = rng_x.standard_normal((config.T, p)) @ chol.T
    y = X @ np.asarray(config.beta) + rng_e.normal(0.0, config.sigma, config.T)
    return X, y
