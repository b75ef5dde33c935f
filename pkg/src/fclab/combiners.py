"""Streaming forecast combiners under a common predict/observe protocol.

At each time step a combiner first sees the K candidate forecasts and emits
a combined forecast (``predict``), then learns the realized value
(``observe``) and updates its state.  ``predict`` may only use information
from strictly earlier steps plus the current candidates.

Methods:

* ``sa``     -- simple average, equal weights, no state.
* ``bg``     -- inverse mean-squared-error weighting, no correlation terms.
* ``linreg`` -- regression of realized values on the candidate forecasts,
  unrestricted coefficients with an intercept.
* ``after``  -- exponential re-weighting: each candidate's cumulative log
  score is a Gaussian log likelihood of its past errors under a running
  variance estimate, and the weights are the exp-normalized scores.

``Rolling`` wraps any combiner so that its state at each step is rebuilt
from only the most recent window of (candidates, realized value) pairs.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from .core import WeightVector
from .errors import (
    AlignmentError,
    ConfigError,
    NoCandidatesError,
    NumericInputError,
    ProtocolError,
)
from .numerics import DEFAULT_VARIANCE_FLOOR, ols


def sa_predict(candidates) -> float:
    """Equal-weight combination: the arithmetic mean of the candidates."""
    c = np.asarray(candidates, dtype=float).ravel()
    if c.size == 0:
        raise NoCandidatesError("cannot average an empty candidate set")
    if not np.all(np.isfinite(c)):
        raise NumericInputError("candidates must be finite")
    return float(c.mean())


class Combiner:
    """Base class implementing the protocol plumbing.

    Subclasses provide ``_predict`` (pure), ``_update`` (state transition),
    ``current_weights`` and ``spawn``.  ``update`` exposes the bare state
    transition so rolling wrappers can replay history without interleaving
    predictions.
    """

    name = "base"

    def __init__(self) -> None:
        self._k: int | None = None
        self._pending: np.ndarray | None = None

    # -- protocol surface -------------------------------------------------
    def predict(self, candidates) -> float:
        c = self._coerce(candidates)
        self._pending = c
        return self._predict(c)

    def observe(self, y: float) -> None:
        if self._pending is None:
            raise ProtocolError("observe() called before predict()")
        c, self._pending = self._pending, None
        self._checked_update(c, float(y))

    def update(self, candidates, y: float) -> None:
        """State transition for (candidates, y) without a prediction."""
        self._checked_update(self._coerce(candidates), float(y))

    def current_weights(self) -> WeightVector:
        raise NotImplementedError

    def spawn(self) -> "Combiner":
        """Fresh instance with the same configuration and empty state."""
        raise NotImplementedError

    # -- helpers -----------------------------------------------------------
    def _checked_update(self, c: np.ndarray, y: float) -> None:
        if not math.isfinite(y):
            raise NumericInputError("realized value must be finite")
        self._update(c, y)

    def _coerce(self, candidates) -> np.ndarray:
        c = np.asarray(candidates, dtype=float).ravel()
        if c.size == 0:
            raise NoCandidatesError("combiner received an empty candidate set")
        if not np.all(np.isfinite(c)):
            raise NumericInputError("candidates must be finite")
        self._ensure_k(c.size)
        return c

    def _ensure_k(self, k: int) -> None:
        if self._k is None:
            self._k = k
            self._init_state(k)
        elif k != self._k:
            raise AlignmentError(f"candidate count changed from {self._k} to {k}")

    def _init_state(self, k: int) -> None:
        pass

    def _require_k(self) -> int:
        if self._k is None:
            raise ProtocolError("no candidates seen yet; weights undefined")
        return self._k

    def _predict(self, c: np.ndarray) -> float:
        raise NotImplementedError

    def _update(self, c: np.ndarray, y: float) -> None:
        raise NotImplementedError


class SimpleAverage(Combiner):
    """Equal weights at every step."""

    name = "sa"

    def _predict(self, c: np.ndarray) -> float:
        return float(c.mean())

    def _update(self, c: np.ndarray, y: float) -> None:
        pass

    def current_weights(self) -> WeightVector:
        k = self._require_k()
        return WeightVector(np.full(k, 1.0 / k), kind="simplex")

    def spawn(self) -> "SimpleAverage":
        return SimpleAverage()


class InverseMseWeighting(Combiner):
    """Weights proportional to the inverse of each candidate's mean squared
    past error (no cross-candidate covariance terms); uniform until the
    first observation.
    """

    name = "bg"

    def __init__(self, variance_floor: float = DEFAULT_VARIANCE_FLOOR) -> None:
        super().__init__()
        if not variance_floor > 0.0:
            raise ConfigError("variance_floor must be positive")
        self.variance_floor = float(variance_floor)
        self._sq_sums: np.ndarray | None = None
        self._count = 0

    def _init_state(self, k: int) -> None:
        self._sq_sums = np.zeros(k)

    def _weights_array(self) -> np.ndarray:
        k = self._require_k()
        if self._count == 0:
            return np.full(k, 1.0 / k)
        mse = self._sq_sums / self._count
        inv = 1.0 / np.maximum(mse, self.variance_floor)
        w = inv / inv.sum()
        return w / w.sum()

    def _predict(self, c: np.ndarray) -> float:
        return float(self._weights_array() @ c)

    def _update(self, c: np.ndarray, y: float) -> None:
        e = y - c
        self._sq_sums += e * e
        self._count += 1

    def current_weights(self) -> WeightVector:
        return WeightVector(self._weights_array(), kind="simplex")

    def spawn(self) -> "InverseMseWeighting":
        return InverseMseWeighting(self.variance_floor)


class ExponentialReweighting(Combiner):
    """Multiplicative weight updates from past squared errors.

    After observing error ``e`` for candidate ``i`` with variance estimate
    ``v``, the candidate's log score gains ``-e^2 / (2 v) - log(v) / 2``;
    weights are the exp-normalized scores, starting uniform.

    The variance estimate before any error exists is ``prior_variance``.
    Afterwards it depends on ``variance_mode``:

    * ``common`` (default): one shared estimate of the conditional noise
      variance, the best candidate's mean squared error shrunk toward the
      prior (the prior counts as one pseudo-observation).  Sharing the
      scale makes the weights respond directly to loss differences and is
      robust to a single early error being accidentally tiny.
    * ``per_candidate``: each candidate scored against its own running
      mean squared error (floored), so the error term is self-normalized
      and discrimination runs through the ``log(v)/2`` term only.

    ``clip_bound`` optionally truncates candidates to within ``M`` of the
    realized value before the error is computed (a robustness guard; off by
    default).  ``fixed_variance`` pins the variance estimate, which is
    useful for diagnostics and hand-checked examples.
    """

    name = "after"

    def __init__(
        self,
        prior_variance: float = 1.0,
        variance_floor: float = DEFAULT_VARIANCE_FLOOR,
        clip_bound: float | None = None,
        fixed_variance: float | None = None,
        variance_mode: str = "common",
    ) -> None:
        super().__init__()
        if not prior_variance > 0.0:
            raise ConfigError("prior_variance must be positive")
        if not variance_floor > 0.0:
            raise ConfigError("variance_floor must be positive")
        if clip_bound is not None and not clip_bound > 0.0:
            raise ConfigError("clip_bound must be positive when set")
        if fixed_variance is not None and not fixed_variance > 0.0:
            raise ConfigError("fixed_variance must be positive when set")
        if variance_mode not in ("common", "per_candidate"):
            raise ConfigError(f"unknown variance_mode: {variance_mode!r}")
        self.prior_variance = float(prior_variance)
        self.variance_floor = float(variance_floor)
        self.clip_bound = clip_bound
        self.fixed_variance = fixed_variance
        self.variance_mode = variance_mode
        self._log_scores: np.ndarray | None = None
        self._sq_sums: np.ndarray | None = None
        self._count = 0

    def _init_state(self, k: int) -> None:
        self._log_scores = np.zeros(k)
        self._sq_sums = np.zeros(k)

    def _variances(self) -> np.ndarray:
        k = self._require_k()
        if self.fixed_variance is not None:
            return np.full(k, self.fixed_variance)
        if self._count == 0:
            return np.full(k, self.prior_variance)
        if self.variance_mode == "common":
            v = (self.prior_variance + self._sq_sums.min()) / (1.0 + self._count)
            return np.full(k, max(v, self.variance_floor))
        return np.maximum(self._sq_sums / self._count, self.variance_floor)

    def _weights_array(self) -> np.ndarray:
        s = self._log_scores
        w = np.exp(s - s.max())
        w /= w.sum()
        return w / w.sum()

    def _predict(self, c: np.ndarray) -> float:
        return float(self._weights_array() @ c)

    def _update(self, c: np.ndarray, y: float) -> None:
        if self.clip_bound is not None:
            c = np.clip(c, y - self.clip_bound, y + self.clip_bound)
        e = y - c
        v = self._variances()
        self._log_scores += -(e * e) / (2.0 * v) - 0.5 * np.log(v)
        # re-center so scores stay finite over long horizons (shift invariant)
        self._log_scores -= self._log_scores.max()
        self._sq_sums += e * e
        self._count += 1

    def current_weights(self) -> WeightVector:
        self._require_k()
        return WeightVector(self._weights_array(), kind="simplex")

    def spawn(self) -> "ExponentialReweighting":
        return ExponentialReweighting(
            prior_variance=self.prior_variance,
            variance_floor=self.variance_floor,
            clip_bound=self.clip_bound,
            fixed_variance=self.fixed_variance,
            variance_mode=self.variance_mode,
        )


class LinearRegressionCombiner(Combiner):
    """Regresses realized values on the candidate forecasts.

    Coefficients are unrestricted and include an intercept by default.
    Until ``min_obs`` (default K + 2) observations are stored, predictions
    fall back to the simple average so the method stays defined over the
    whole evaluation window.  Rank-deficient designs (duplicated
    candidates) get the minimum-norm solution.
    """

    name = "linreg"

    def __init__(self, intercept: bool = True, min_obs: int | None = None) -> None:
        super().__init__()
        if min_obs is not None and min_obs < 1:
            raise ConfigError("min_obs must be >= 1 when set")
        self.intercept = bool(intercept)
        self.min_obs = min_obs
        self._rows_c: list[np.ndarray] = []
        self._rows_y: list[float] = []

    def _effective_min_obs(self) -> int:
        if self.min_obs is not None:
            return self.min_obs
        return self._require_k() + 2

    def _fit(self):
        X = np.vstack(self._rows_c)
        return ols(X, np.asarray(self._rows_y), intercept=self.intercept)

    def _predict(self, c: np.ndarray) -> float:
        if len(self._rows_y) < self._effective_min_obs():
            return float(c.mean())
        fit = self._fit()
        return float(fit.predict(c[None, :])[0])

    def _update(self, c: np.ndarray, y: float) -> None:
        self._rows_c.append(c.copy())
        self._rows_y.append(y)

    def current_weights(self) -> WeightVector:
        k = self._require_k()
        if len(self._rows_y) < self._effective_min_obs():
            return WeightVector(np.full(k, 1.0 / k), kind="simplex")
        return WeightVector(self._fit().coefficients, kind="unrestricted")

    def spawn(self) -> "LinearRegressionCombiner":
        return LinearRegressionCombiner(intercept=self.intercept, min_obs=self.min_obs)


class Rolling(Combiner):
    """Restrict a combiner's memory to the last ``window`` observations.

    At each step the wrapped combiner is rebuilt from scratch on exactly the
    last ``min(window, available)`` (candidates, y) pairs, so e.g. the
    exponential combiner's log scores become sums over that window only.
    With ``window`` at least the full history length the wrapper reproduces
    the plain combiner bit for bit.
    """

    def __init__(self, inner: Combiner, window: int) -> None:
        super().__init__()
        if window < 2:
            raise ConfigError(f"rolling window must be >= 2, got {window}")
        self.inner = inner
        self.window = int(window)
        self.name = inner.name
        self._history: deque[tuple[np.ndarray, float]] = deque(maxlen=self.window)

    def _rebuild(self) -> Combiner:
        m = self.inner.spawn()
        if self._k is not None:
            m._ensure_k(self._k)
        for c, y in self._history:
            m.update(c, y)
        return m

    def _predict(self, c: np.ndarray) -> float:
        return self._rebuild()._predict(c)

    def _update(self, c: np.ndarray, y: float) -> None:
        self._history.append((c.copy(), y))

    def current_weights(self) -> WeightVector:
        return self._rebuild().current_weights()

    def spawn(self) -> "Rolling":
        return Rolling(self.inner.spawn(), self.window)
