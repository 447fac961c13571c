"""Empirical convergence rates of plug-in error and one-step bias.

Two kinds of study: a deterministic sweep ``Ptilde_t = P + t (Q - P)`` along
a fixed direction, and a Monte Carlo sweep over sample sizes where
``Ptilde`` is a half-sample KDE.  Both report least-squares log-log slopes
against the L2 distance between ``Ptilde`` and ``P``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dist import Distribution, GridDensity, check_same_support, mix, sample
from .errors import DomainError
from .estimators import KdeConfig, split_fit
from .functionals import Functional, influence_derivative
from .io import table_to_csv
from .paths import Path, exact_r2

# first-order terms and errors below this are treated as exactly zero
DEGENERATE_TOL = 1e-12
ZERO_TOL = 1e-12
DEFAULT_T_GRID = tuple(2.0 ** -k for k in range(8))


def loglog_slope(xs, ys) -> float:
    """OLS slope of ``log ys`` on ``log xs``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise DomainError("need two equal-length vectors with at least 2 entries")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("log-log slope needs strictly positive inputs")
    lx, ly = np.log(xs), np.log(ys)
    lx = lx - lx.mean()
    if not np.any(lx != 0):
        raise DomainError("all x values coincide")
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))


def _fit_abs(xs: np.ndarray, ys: np.ndarray) -> tuple[Optional[float], list[int]]:
    """Slope of ``|ys|`` on ``xs`` over the nonzero entries; also the excluded indices."""
    keep = np.abs(ys) > ZERO_TOL
    excluded = [int(i) for i in np.flatnonzero(~keep)]
    if keep.sum() < 2:
        return None, excluded
    return loglog_slope(xs[keep], np.abs(ys[keep])), excluded


@dataclass(frozen=True, eq=False)
class RateStudyResult:
    """Errors along a sweep toward ``P`` and their fitted log-log slopes.

    A slope is ``None`` when fewer than two nonzero errors remain.  For
    direction sweeps ``degenerate`` marks a direction whose first-order term
    vanishes; its plug-in slope is then not fitted.
    """

    t: np.ndarray
    distances: np.ndarray
    plug_in_errors: np.ndarray
    one_step_biases: np.ndarray
    slope_plug_in: Optional[float]
    slope_one_step: Optional[float]
    excluded_plug_in: list = field(default_factory=list)
    excluded_one_step: list = field(default_factory=list)
    degenerate: bool = False
    first_order_term: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def one_step_exact_zero(self) -> bool:
        return bool(np.all(np.abs(self.one_step_biases) <= ZERO_TOL))

    def to_csv(self) -> str:
        return table_to_csv(["t", "distance", "plug_in_error", "one_step_bias"],
                            zip(self.t, self.distances, self.plug_in_errors, self.one_step_biases))

    def summary(self) -> dict:
        return {
            "slope_plug_in": self.slope_plug_in,
            "slope_one_step": self.slope_one_step,
            "excluded_points": {"plug_in": self.excluded_plug_in, "one_step": self.excluded_one_step},
            "degenerate_direction": self.degenerate,
            "one_step_exact_zero": self.one_step_exact_zero,
            "first_order_term": self.first_order_term,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def direction_sweep(P: Distribution, Q: Distribution, T: Functional,
                    t_grid: Sequence[float] = DEFAULT_T_GRID) -> RateStudyResult:
    """Move ``Ptilde_t`` toward ``P`` along ``Q - P`` and record both error types.

    Plug-in error is ``T(Ptilde_t) - T(P)``; one-step bias is the exact
    remainder of the path ``(P, Ptilde_t)``.
    """
    check_same_support(P, Q)
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise DomainError("need at least two sweep points")
    if np.any(t <= 0) or np.any(t > 1):
        raise DomainError("sweep points must lie in (0, 1]")
    if np.any(np.diff(t) >= 0):
        raise DomainError("sweep points must be strictly decreasing")
    TP = T.evaluate(P)
    first = influence_derivative(T, P, Q)
    dist, plug, bias = (np.empty(t.size) for _ in range(3))
    for i, ti in enumerate(t):
        path = Path(P, mix(P, Q, ti))
        dist[i] = path.distance
        plug[i] = T.evaluate(path.initial) - TP
        bias[i] = exact_r2(path, T)
    degenerate = abs(first) < DEGENERATE_TOL
    if degenerate:
        slope_plug, excl_plug = None, list(range(t.size))
    else:
        slope_plug, excl_plug = _fit_abs(dist, plug)
    slope_os, excl_os = _fit_abs(dist, bias)
    return RateStudyResult(t, dist, plug, bias, slope_plug, slope_os, excl_plug, excl_os,
                           degenerate, float(first))


def kde_rate_sweep(P: GridDensity, T: Functional, n_grid: Sequence[int], reps: int,
                   config: KdeConfig = KdeConfig(), seed: int = 0) -> RateStudyResult:
    """Monte Carlo analogue of :func:`direction_sweep` with ``Ptilde`` a half-sample KDE.

    For each ``n`` and replication ``r`` (seed ``seed + r``) the sample is
    split, the KDE fit on one half and the one-step estimate formed on the
    other.  Per ``n`` the result holds the mean distance, the mean plug-in
    error of that KDE, and the mean one-step bias given the KDE (the exact
    remainder, which is the split estimator's expectation over the evaluation
    half).  ``extra`` carries the realized one-step error means, their
    Monte Carlo standard errors and the mean squared distance.
    """
    n_arr = np.asarray(n_grid, dtype=int)
    if n_arr.ndim != 1 or n_arr.size < 2 or np.any(np.diff(n_arr) <= 0):
        raise DomainError("n_grid must be strictly increasing with at least 2 entries")
    if reps < 1:
        raise DomainError("need at least one replication")
    TP = T.evaluate(P)
    dist, plug, bias, realized, realized_se, msd = (np.empty(n_arr.size) for _ in range(6))
    for i, n in enumerate(n_arr):
        d, pe, b, err = (np.empty(reps) for _ in range(4))
        for r in range(reps):
            s = sample(P, int(n), seed + r)
            sf = split_fit(T, s, config, seed + r, P.grid)
            path = Path(P, sf.initial)
            d[r] = path.distance
            pe[r] = sf.report.plug_in - TP
            b[r] = exact_r2(path, T)
            err[r] = sf.report.estimate - TP
        dist[i], plug[i], bias[i] = d.mean(), pe.mean(), b.mean()
        msd[i] = np.mean(d * d)
        realized[i] = err.mean()
        realized_se[i] = err.std(ddof=1) / np.sqrt(reps) if reps > 1 else float("nan")
    slope_plug, excl_plug = _fit_abs(dist, plug)
    slope_os, excl_os = _fit_abs(dist, bias)
    extra = {
        "n_grid": n_arr.tolist(),
        "reps": int(reps),
        "one_step_realized_error": realized.tolist(),
        "one_step_realized_mc_se": realized_se.tolist(),
        "mean_squared_distance": msd.tolist(),
    }
    return RateStudyResult(n_arr.astype(float), dist, plug, bias, slope_plug, slope_os,
                           excl_plug, excl_os, extra=extra)
