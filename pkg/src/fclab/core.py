"""Shared domain types and the evaluation metrics built on them.

Everything here is immutable after construction and safe to share across
replications; the metric functions are pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    DegenerateBaselineError,
    EmptyWindowError,
    MissingDataError,
)

#: Tolerance on |sum(w) - 1| for simplex weight vectors.
SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class WeightVector:
    """Combination weights.

    ``simplex`` weights are nonnegative and sum to one (convex combiners);
    ``unrestricted`` weights are arbitrary finite regression coefficients.
    """

    w: np.ndarray
    kind: str = "simplex"

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if self.kind not in ("simplex", "unrestricted"):
            raise ValueError(f"unknown weight kind: {self.kind!r}")
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if self.kind == "simplex":
            if np.any(w < 0.0) or abs(float(w.sum()) - 1.0) > SIMPLEX_TOL:
                raise ValueError("simplex weights must be >= 0 and sum to 1")

    def __len__(self) -> int:
        return int(self.w.size)


@dataclass(frozen=True)
class EvaluationWindow:
    """Time span driving a combination run.

    ``combine_start`` is the first time index at which combined forecasts
    are produced, ``eval_start``..``eval_end`` the span entering the loss
    average.  All three are values of the panel's integer time index.
    """

    combine_start: int
    eval_start: int
    eval_end: int

    def __post_init__(self) -> None:
        if not (self.combine_start <= self.eval_start <= self.eval_end):
            raise ValueError(
                "window must satisfy combine_start <= eval_start <= eval_end, "
                f"got ({self.combine_start}, {self.eval_start}, {self.eval_end})"
            )


@dataclass(frozen=True)
class ForecastPanel:
    """A realized series plus K aligned candidate forecast series.

    ``forecasts[name][i]`` is the forecast of ``y[i]`` made before ``y[i]``
    was observed.  Panels must be complete: no missing values anywhere.
    ``presample_y`` optionally carries realized values from before the
    combine span (used to scale variance priors); ``horizon_label`` tags
    multi-horizon panel files.
    """

    times: np.ndarray
    y: np.ndarray
    forecasts: dict[str, np.ndarray]
    horizon_label: int | None = None
    target: str | None = None
    presample_y: np.ndarray | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=int)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "y", y)
        if len(self.forecasts) < 1:
            raise ValueError("panel needs at least one candidate forecast")
        fc = {k: np.asarray(v, dtype=float) for k, v in self.forecasts.items()}
        object.__setattr__(self, "forecasts", fc)
        n = times.size
        if y.size != n or any(v.size != n for v in fc.values()):
            raise AlignmentError("all panel series must share one length")
        if n == 0:
            raise ValueError("panel must be non-empty")
        if np.any(np.diff(times) <= 0):
            raise ValueError("time index must be strictly increasing")
        if not np.all(np.isfinite(y)):
            raise MissingDataError("realized series contains non-finite values")
        for name, v in fc.items():
            if not np.all(np.isfinite(v)):
                raise MissingDataError(f"forecast series {name!r} contains non-finite values")
        if self.presample_y is not None:
            ps = np.asarray(self.presample_y, dtype=float)
            object.__setattr__(self, "presample_y", ps)
            if not np.all(np.isfinite(ps)):
                raise MissingDataError("presample series contains non-finite values")

    @property
    def n_times(self) -> int:
        return int(self.times.size)

    @property
    def n_candidates(self) -> int:
        return len(self.forecasts)

    @property
    def names(self) -> list[str]:
        return list(self.forecasts)

    def candidate_matrix(self) -> np.ndarray:
        """Forecasts stacked as a (T, K) array in insertion order."""
        return np.column_stack([self.forecasts[k] for k in self.forecasts])

    def subset(self, names: Sequence[str]) -> "ForecastPanel":
        """Panel restricted to the named candidates, order preserved."""
        return ForecastPanel(
            times=self.times,
            y=self.y,
            forecasts={k: self.forecasts[k] for k in names},
            horizon_label=self.horizon_label,
            target=self.target,
            presample_y=self.presample_y,
        )


@dataclass(frozen=True)
class RiskReport:
    """Per-method normalized risk (unitless ratio against the baseline)."""

    method: str
    point: float
    se: float
    n_reps: int

    def __post_init__(self) -> None:
        # point == 0 only in degenerate exact-interpolation fixtures
        if not (self.point >= 0.0 and math.isfinite(self.point)):
            raise ValueError(f"risk point must be finite and >= 0, got {self.point}")
        if not (self.se >= 0.0 and math.isfinite(self.se)):
            raise ValueError(f"risk se must be finite and >= 0, got {self.se}")
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")


def msfe(
    actual: Sequence[float] | np.ndarray,
    predicted: Sequence[float] | np.ndarray,
    window: EvaluationWindow | None = None,
    times: np.ndarray | None = None,
) -> float:
    """Mean square forecast error over an evaluation window.

    ``times`` defaults to ``1..T``; only observations with
    ``eval_start <= t <= eval_end`` enter the average.
    """
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape or a.ndim != 1:
        raise AlignmentError(f"series lengths differ: {a.shape} vs {p.shape}")
    if times is None:
        t = np.arange(1, a.size + 1)
    else:
        t = np.asarray(times, dtype=int)
        if t.shape != a.shape:
            raise AlignmentError("times must align with the series")
    if window is not None:
        mask = (t >= window.eval_start) & (t <= window.eval_end)
    else:
        mask = np.ones(a.size, dtype=bool)
    if not mask.any():
        raise EmptyWindowError("evaluation window selects no observations")
    d = a[mask] - p[mask]
    return float(np.mean(d * d))


def normalize_vs_baseline(
    msfes: Mapping[str, Sequence[float]],
    baseline: str,
) -> list[RiskReport]:
    """Turn per-replication MSFEs into normalized risk reports.

    Each replication's MSFE is divided by the baseline's MSFE in the same
    replication; the report carries the mean ratio and its standard error
    across replications.  The baseline row is pinned to exactly 1.
    """
    if baseline not in msfes:
        raise DegenerateBaselineError(f"baseline {baseline!r} missing from reports")
    base = np.asarray(msfes[baseline], dtype=float)
    n = base.size
    if n == 0:
        raise DegenerateBaselineError("no replications to normalize")
    if np.any(base <= 0.0):
        raise DegenerateBaselineError("baseline MSFE must be positive in every replication")
    out: list[RiskReport] = []
    for method, values in msfes.items():
        v = np.asarray(values, dtype=float)
        if v.size != n:
            raise AlignmentError(f"method {method!r} has {v.size} reps, baseline has {n}")
        if method == baseline:
            out.append(RiskReport(method=method, point=1.0, se=0.0, n_reps=n))
            continue
        ratios = v / base
        point = float(np.mean(ratios))
        se = float(np.std(ratios, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        out.append(RiskReport(method=method, point=point, se=se, n_reps=n))
    return out
