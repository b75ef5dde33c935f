"""Two-step subset screening: best subset per model size, then retention of
the top X% by a complexity-penalized criterion.

The retained subset models become candidate forecasts for combination:
their variable sets are frozen after screening while coefficients keep
being re-estimated recursively out of sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import ForecastPanel
from .dgp import ScreeningConfig, generate_screening
from .errors import BudgetError, ConfigError, InsufficientDataError
from .numerics import LeastSquaresFit, SeededGenerator, ols

#: Exhaustive best-subset search is only allowed up to this many regressors.
EXHAUSTIVE_MAX_P = 15

_SWAP_TOL = 1e-10


@dataclass(frozen=True)
class SubsetModel:
    """Best model of a given size, with its screening-sample fit.

    ``variable_indices`` are 1-based and sorted; ``abc_score`` is attached
    by :func:`score_models`.
    """

    variable_indices: tuple[int, ...]
    size: int
    fit: LeastSquaresFit
    sse: float
    abc_score: float | None = None

    def __post_init__(self) -> None:
        if self.size != len(self.variable_indices):
            raise ConfigError("size must equal the number of selected variables")


class _GramSolver:
    """SSE of arbitrary subsets from precomputed cross-products."""

    def __init__(self, X: np.ndarray, y: np.ndarray) -> None:
        self.G = X.T @ X
        self.c = X.T @ y
        self.yy = float(y @ y)

    def sse(self, idx: Sequence[int]) -> float:
        ix = np.asarray(idx, dtype=int)
        G = self.G[np.ix_(ix, ix)]
        c = self.c[ix]
        try:
            b = np.linalg.solve(G, c)
        except np.linalg.LinAlgError:
            b = np.linalg.lstsq(G, c, rcond=None)[0]
        return max(self.yy - float(c @ b), 0.0)


def _forward_path(solver: _GramSolver, p: int) -> list[list[int]]:
    """Greedy forward-selection path: one 0-based index set per size."""
    selected: list[int] = []
    remaining = list(range(p))
    path = []
    for _ in range(p):
        best_j, best_sse = None, np.inf
        for j in remaining:
            s = solver.sse(selected + [j])
            if s < best_sse - _SWAP_TOL or best_j is None:
                best_j, best_sse = j, s
        selected.append(best_j)
        remaining.remove(best_j)
        path.append(sorted(selected))
    return path


def _swap_refine(solver: _GramSolver, idx: list[int], p: int, max_sweeps: int = 20) -> list[int]:
    """Improve a subset by repeated best single-variable swaps."""
    current = list(idx)
    current_sse = solver.sse(current)
    for _ in range(max_sweeps):
        best = None
        comp = [j for j in range(p) if j not in current]
        for i in current:
            base = [v for v in current if v != i]
            for j in comp:
                s = solver.sse(base + [j])
                if s < current_sse - _SWAP_TOL and (best is None or s < best[0]):
                    best = (s, i, j)
        if best is None:
            break
        current_sse, i, j = best
        current.remove(i)
        current.append(j)
    return sorted(current)


def best_per_size(
    X: np.ndarray,
    y: np.ndarray,
    strategy: str = "stepwise",
) -> list[SubsetModel]:
    """Best subset of each size r = 1..p by in-sample SSE.

    ``exhaustive`` enumerates all subsets (guarded to p <= 15);
    ``stepwise`` runs forward selection with single-swap refinement, the
    default search for p = 20.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if strategy not in ("stepwise", "exhaustive"):
        raise ConfigError(f"unknown search strategy: {strategy!r}")
    if strategy == "exhaustive" and p > EXHAUSTIVE_MAX_P:
        raise BudgetError(f"exhaustive search limited to p <= {EXHAUSTIVE_MAX_P}, got p = {p}")
    if strategy == "exhaustive" and n <= p:
        raise InsufficientDataError("exhaustive search needs n > p")
    solver = _GramSolver(X, y)

    best_sets: list[list[int]] = []
    if strategy == "exhaustive":
        for r in range(1, p + 1):
            best_idx, best_sse = None, np.inf
            for combo in combinations(range(p), r):
                s = solver.sse(combo)
                if s < best_sse - _SWAP_TOL or best_idx is None:
                    best_idx, best_sse = list(combo), s
            best_sets.append(best_idx)
    else:
        for idx in _forward_path(solver, p):
            best_sets.append(_swap_refine(solver, idx, p))

    models = []
    for r, idx in enumerate(best_sets, start=1):
        fit = ols(X[:, idx], y, intercept=False)
        models.append(
            SubsetModel(
                variable_indices=tuple(int(i) + 1 for i in sorted(idx)),
                size=r,
                fit=fit,
                sse=fit.residual_sum_squares,
            )
        )
    return models


def abc_score(sse: float, r: int, sigma2: float, p: int, n: int) -> float:
    """Subset-model score: SSE + 2 r sigma2 + sigma2 * ln C(p, r).

    ``sigma2`` is the noise-variance plug-in (the full model's estimation
    mean square error); the binomial term prices the search over subsets of
    size r.
    """
    if not (0 <= r <= p):
        raise ConfigError(f"subset size r = {r} outside 0..{p}")
    if sse < 0:
        raise ConfigError("sse must be >= 0")
    if not sigma2 > 0:
        raise ConfigError("sigma2 must be positive")
    if n < 1:
        raise ConfigError("sample size must be >= 1")
    log_choose = math.lgamma(p + 1) - math.lgamma(r + 1) - math.lgamma(p - r + 1)
    return sse + 2.0 * r * sigma2 + sigma2 * log_choose


def score_models(models: Sequence[SubsetModel], sigma2: float, p: int, n: int) -> list[SubsetModel]:
    """Attach the complexity-penalized score to each subset model."""
    return [replace(m, abc_score=abc_score(m.sse, m.size, sigma2, p, n)) for m in models]


def retain_top(models: Sequence[SubsetModel], x_percent: float) -> list[SubsetModel]:
    """Keep the ceil(p * X / 100) models with the smallest scores.

    Ties break toward smaller size, then lexicographically smaller index
    sets, so retained sets are nested across retention levels.
    """
    if not models:
        raise ConfigError("no models to retain")
    if any(m.abc_score is None for m in models):
        raise ConfigError("models must be scored before retention")
    if not 0 < x_percent <= 100:
        raise ConfigError(f"x_percent must lie in (0, 100], got {x_percent}")
    count = math.ceil(len(models) * x_percent / 100.0)
    ranked = sorted(models, key=lambda m: (m.abc_score, m.size, m.variable_indices))
    return ranked[:count]


def screen_models(X: np.ndarray, y: np.ndarray, strategy: str = "stepwise") -> list[SubsetModel]:
    """Full screening pass on one estimation sample: best-per-size models
    scored with the full model's mean square error as the noise plug-in."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n <= p:
        raise InsufficientDataError("screening sample must have n > p")
    models = best_per_size(X, y, strategy=strategy)
    full = models[-1]
    sigma2 = full.sse / (n - p)
    return score_models(models, sigma2, p, n)


def subset_forecasts(
    X: np.ndarray,
    y: np.ndarray,
    models: Sequence[SubsetModel],
    start: int,
) -> np.ndarray:
    """Recursive out-of-sample forecasts of the retained subset models.

    For each 0-based time ``t >= start``, each model's coefficients are
    re-estimated on rows ``0..t-1`` (variable sets stay frozen), giving a
    ``(T - start, len(models))`` forecast matrix.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    T, p = X.shape
    if not 0 < start < T:
        raise ConfigError("start must fall inside the sample")
    idx_sets = [np.asarray(m.variable_indices, dtype=int) - 1 for m in models]
    G = X[:start].T @ X[:start]
    c = X[:start].T @ y[:start]
    out = np.empty((T - start, len(models)))
    for i, t in enumerate(range(start, T)):
        for j, ix in enumerate(idx_sets):
            Gs = G[np.ix_(ix, ix)]
            cs = c[ix]
            try:
                b = np.linalg.solve(Gs, cs)
            except np.linalg.LinAlgError:
                b = np.linalg.lstsq(Gs, cs, rcond=None)[0]
            out[i, j] = float(X[t, ix] @ b)
        row = X[t]
        G += np.outer(row, row)
        c += row * y[t]
    return out


def screening_forecast_panel(
    config: ScreeningConfig,
    x_percent: float,
    gen: SeededGenerator,
    strategy: str = "stepwise",
) -> ForecastPanel:
    """One-shot pipeline: simulate, screen, retain and forecast."""
    X, y = generate_screening(config, gen)
    models = screen_models(X[: config.screen_end], y[: config.screen_end], strategy=strategy)
    retained = retain_top(models, x_percent)
    F = subset_forecasts(X, y, retained, start=config.screen_end)
    return ForecastPanel(
        times=np.arange(config.screen_end + 1, config.T + 1),
        y=y[config.screen_end :],
        forecasts={f"f{j + 1}": F[:, j] for j in range(len(retained))},
        presample_y=y[: config.screen_end],
    )


def retained_index_sets(models: Sequence[SubsetModel]) -> list[list[int]]:
    """Serializable view of retained subsets (1-based index lists)."""
    return [list(m.variable_indices) for m in models]
