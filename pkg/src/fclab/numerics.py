"""Numerical kernels: least squares, variance tracking, stable weight
normalization, and reproducible random streams."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import WeightVector
from .errors import (
    DegenerateWeightsError,
    InsufficientDataError,
    NumericInputError,
)

#: Default lower bound on any variance estimate entering a division.
DEFAULT_VARIANCE_FLOOR = 1e-8

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class LeastSquaresFit:
    """Result of an ordinary least squares solve.

    ``coefficients`` holds one entry per regressor; ``intercept`` is 0.0
    when the fit was performed without one.  Rank-deficient systems get the
    minimum-norm solution.
    """

    coefficients: np.ndarray
    intercept: float
    residual_sum_squares: float
    rank: int
    dof: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X @ self.coefficients + self.intercept


def ols(
    X: np.ndarray,
    y: Sequence[float] | np.ndarray,
    intercept: bool = False,
) -> LeastSquaresFit:
    """Least squares of ``y`` on the columns of ``X``.

    Returns the minimum-norm solution when the design is rank deficient,
    which keeps regression combiners defined on duplicated candidates.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n = y.size
    if n == 0 or X.shape[0] == 0:
        raise InsufficientDataError("least squares needs at least one observation")
    if X.shape[0] != n:
        raise InsufficientDataError(f"design has {X.shape[0]} rows but y has {n}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NumericInputError("least squares inputs must be finite")
    A = np.column_stack([np.ones(n), X]) if intercept else X
    beta, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ beta
    rss = float(resid @ resid)
    if intercept:
        b0, coef = float(beta[0]), beta[1:]
    else:
        b0, coef = 0.0, beta
    return LeastSquaresFit(
        coefficients=coef,
        intercept=b0,
        residual_sum_squares=rss,
        rank=int(rank),
        dof=n - int(rank),
    )


def running_error_variance(
    errors: Sequence[float] | np.ndarray,
    floor: float = DEFAULT_VARIANCE_FLOOR,
    prior: float = 1.0,
) -> float:
    """Mean squared error of a forecast-error history, floored away from 0.

    An empty history returns ``prior`` (the caller's variance prior);
    otherwise ``max(mean(e^2), floor)``.
    """
    if not floor > 0.0:
        raise ValueError("variance floor must be positive")
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        return float(prior)
    return max(float(np.mean(e * e)), float(floor))


def normalize_log_weights(log_scores: Sequence[float] | np.ndarray) -> WeightVector:
    """exp-normalize log scores onto the simplex without overflow.

    Entries of ``-inf`` receive zero weight; at least one entry must be
    finite.
    """
    s = np.asarray(log_scores, dtype=float)
    if s.size == 0:
        raise DegenerateWeightsError("no scores to normalize")
    if np.any(np.isnan(s)) or np.any(s == np.inf):
        raise NumericInputError("log scores must not contain NaN or +inf")
    m = np.max(s)
    if m == -np.inf:
        raise DegenerateWeightsError("all log scores are -inf")
    w = np.exp(s - m)
    w /= w.sum()
    return WeightVector(w=w, kind="simplex")


@dataclass(frozen=True)
class SeededGenerator:
    """Deterministic random stream keyed by (seed, stream_id).

    Identical keys reproduce identical draw sequences across runs and
    platforms.  One stream per replication; ``spawn`` derives independent
    component substreams without disturbing the parent.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def rng(self) -> np.random.Generator:
        entropy = (self.seed & _SEED_MASK, self.stream_id) + self.path
        return np.random.default_rng(np.random.SeedSequence(entropy))

    def spawn(self, *tags: int) -> "SeededGenerator":
        return SeededGenerator(self.seed, self.stream_id, self.path + tags)

    def for_replication(self, rep: int) -> "SeededGenerator":
        return SeededGenerator(self.seed, rep)
