"""Analytic asymptotic-risk baselines for the regression cases, plus a
brute-force Monte Carlo estimator of finite-sample forecast risk.

The closed forms give the large-T limit of the risk of Forecast 1 relative
to the simple average; the Monte Carlo estimator replays the full DGP +
estimation pipeline and averages one-step-ahead squared errors, and is the
reference whenever finite-sample expectations have no closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .combiners import Combiner
from .core import WeightVector
from .dgp import ScenarioConfig, generate_case
from .errors import ConfigError
from .numerics import SeededGenerator


@dataclass(frozen=True)
class AsymptoticResult:
    """Large-T risk ratio (Forecast 1 over simple average) and, where the
    algebra pins them down, the optimal combination weights."""

    ratio: float
    optimal_weight_restricted: WeightVector | None = None
    optimal_weight_unrestricted: WeightVector | None = None

    def __post_init__(self) -> None:
        if not (self.ratio > 0 and math.isfinite(self.ratio)):
            raise ValueError("risk ratio must be finite and positive")


def case1_limit(beta: float, sigma_x: float = 1.0, sigma: float = 1.0) -> AsymptoticResult:
    """Case 1: ratio sigma^2 / (sigma^2 + beta^2 sigma_x^2 / 4).

    The unrestricted optimum puts all weight on the correctly specified
    candidate.
    """
    if not sigma > 0:
        raise ConfigError("sigma must be positive")
    if not sigma_x > 0:
        raise ConfigError("sigma_x must be positive")
    ratio = sigma**2 / (sigma**2 + beta**2 * sigma_x**2 / 4.0)
    return AsymptoticResult(
        ratio=ratio,
        optimal_weight_unrestricted=WeightVector(np.array([1.0, 0.0]), kind="unrestricted"),
    )


def case2_limit(
    beta: float,
    sigma_x: float = 1.0,
    sigma: float = 1.0,
    rho: float = 0.0,
) -> AsymptoticResult:
    """Case 2: ratio (a (1 - rho^2) + sigma^2) / (a (1 - rho^2)(1 - rho)/2 + sigma^2)
    with a = sigma_x^2 beta^2.

    For rho = 0 the optimal sum-to-one weights are (1/2, 1/2) while the
    unrestricted optimum is (1, 1), which is why the regression combiner
    can beat the simple average at high signal-to-noise.
    """
    if not sigma > 0:
        raise ConfigError("sigma must be positive")
    if not sigma_x > 0:
        raise ConfigError("sigma_x must be positive")
    if abs(rho) > 1:
        raise ConfigError("rho must lie in [-1, 1]")
    a = sigma_x**2 * beta**2
    ratio = (a * (1.0 - rho**2) + sigma**2) / (a * (1.0 - rho**2) * (1.0 - rho) / 2.0 + sigma**2)
    restricted = unrestricted = None
    if rho == 0.0:
        restricted = WeightVector(np.array([0.5, 0.5]), kind="simplex")
        unrestricted = WeightVector(np.array([1.0, 1.0]), kind="unrestricted")
    return AsymptoticResult(
        ratio=ratio,
        optimal_weight_restricted=restricted,
        optimal_weight_unrestricted=unrestricted,
    )


@dataclass(frozen=True)
class McRisk:
    """Monte Carlo risk estimate with its standard error."""

    value: float
    se: float
    n_draws: int


def unit_weight(k: int, i: int) -> WeightVector:
    """Weight vector selecting candidate ``i`` (0-based) alone."""
    w = np.zeros(k)
    w[i] = 1.0
    return WeightVector(w, kind="simplex")


def mc_risk(
    config: ScenarioConfig,
    target: WeightVector | Combiner,
    T: int,
    n_draws: int,
    gen: SeededGenerator,
) -> McRisk:
    """One-step-ahead forecast risk at horizon T + 1 by direct simulation.

    Every draw replays the full pipeline: simulate T + 1 observations,
    re-estimate the candidate models, and score the target's forecast of
    the final observation.  ``target`` is either a fixed weight vector
    applied to the candidates or a combiner prototype driven over the
    combine span.
    """
    if n_draws < 100:
        raise ConfigError("need at least 100 draws for a stable estimate")
    cfg = replace(
        config,
        T=T + 1,
        build_end=None,
        combine_start=None,
        eval_start=None,
    )
    sq = np.empty(n_draws)
    for i in range(n_draws):
        panel = generate_case(cfg, gen.spawn(i))
        cand = panel.candidate_matrix()
        if isinstance(target, WeightVector):
            pred = float(np.asarray(target.w) @ cand[-1])
        else:
            m = target.spawn()
            for row, yv in zip(cand[:-1], panel.y[:-1]):
                m.update(row, yv)
            pred = m.predict(cand[-1])
        d = panel.y[-1] - pred
        sq[i] = d * d
    value = float(np.mean(sq))
    se = float(np.std(sq, ddof=1) / math.sqrt(n_draws)) if n_draws > 1 else 0.0
    return McRisk(value=value, se=se, n_draws=n_draws)
