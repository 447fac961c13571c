"""Plug-in and one-step estimators built on a kernel density estimate.

``one_step`` trusts the caller that the initial estimate was fit without the
evaluation sample.  ``split_one_step`` and ``crossfit_one_step`` enforce that
by fitting on one half of the data and averaging influence values on the
other.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from .dist import Distribution, Grid, GridDensity, SampleSet, expectation, make_rng, sample
from .errors import BandwidthError, DomainError, UnsupportedError
from .functionals import Functional
from .paths import Path, exact_r2

Z_975 = 1.959964
BANDWIDTH_RULES = ("fixed", "reference", "undersmoothed")
BOUNDARY_MODES = ("truncate", "reflect")
# kernel support is cut at this many bandwidths
KERNEL_CUTOFF = 8.0
DEFAULT_C = {"reference": 1.06, "undersmoothed": 2.5}


@dataclass(frozen=True)
class KdeConfig:
    """Gaussian KDE settings.

    ``rule`` is one of ``fixed`` (use ``h``), ``reference`` (``c * sd * n**(-1/5)``)
    or ``undersmoothed`` (``c * sd * n**(-1/3)``).  Leaving ``c`` unset picks
    1.06 for the reference rule and 2.5 for the undersmoothed one; with 2.5 the
    undersmoothed bandwidth is the smaller of the two once n exceeds about 600.
    """

    rule: str = "reference"
    h: Optional[float] = None
    c: Optional[float] = None
    boundary: str = "truncate"
    kernel: str = "gaussian"

    def __post_init__(self):
        if self.kernel != "gaussian":
            raise UnsupportedError(f"only the gaussian kernel is available, got {self.kernel!r}")
        if self.rule not in BANDWIDTH_RULES:
            raise UnsupportedError(f"unknown bandwidth rule {self.rule!r}")
        if self.boundary not in BOUNDARY_MODES:
            raise UnsupportedError(f"unknown boundary mode {self.boundary!r}")
        if self.rule == "fixed" and (self.h is None or not self.h > 0):
            raise BandwidthError("fixed rule needs a positive h")
        if self.c is None:
            object.__setattr__(self, "c", DEFAULT_C.get(self.rule, 1.06))
        if self.rule != "fixed" and not self.c > 0:
            raise BandwidthError("bandwidth constant c must be positive")

    def bandwidth(self, points) -> float:
        if self.rule == "fixed":
            return float(self.h)
        pts = np.asarray(points, dtype=float)
        sd = float(np.std(pts, ddof=1)) if pts.size > 1 else 0.0
        # identical points can leave a rounding-level spread; treat that as zero
        if not sd > 1e-12 * max(1.0, float(np.max(np.abs(pts)))):
            raise BandwidthError(f"{self.rule} bandwidth rule needs positive sample spread")
        power = 0.2 if self.rule == "reference" else 1.0 / 3.0
        return self.c * sd * pts.size ** (-power)


def _linear_bin(points: np.ndarray, grid: Grid) -> np.ndarray:
    pos = (points - grid.lower) / grid.dz - 0.5
    pos = np.clip(pos, 0.0, grid.m - 1)
    left = np.minimum(np.floor(pos).astype(int), grid.m - 2)
    w = pos - left
    counts = np.bincount(left, weights=1.0 - w, minlength=grid.m)
    counts += np.bincount(left + 1, weights=w, minlength=grid.m)
    return counts


def kde_fit(samples: SampleSet, grid: Grid = Grid(), config: KdeConfig = KdeConfig()) -> GridDensity:
    """Gaussian KDE at the grid midpoints, restricted to the interval and renormalized.

    Points are linearly binned onto the midpoints and the bin counts are
    convolved with the sampled kernel.  With ``boundary="reflect"`` the mass
    that would leave the interval is folded back instead of dropped.
    """
    pts = np.asarray(samples.points, dtype=float)
    if pts.size < 2:
        raise DomainError("KDE needs at least 2 samples")
    grid.check_contains(pts)
    h = config.bandwidth(pts)
    m, dz = grid.m, grid.dz
    counts = _linear_bin(pts, grid) / pts.size
    half = int(min(np.ceil(KERNEL_CUTOFF * h / dz), 2 * m))
    offsets = np.arange(-half, half + 1) * dz
    kern = np.exp(-0.5 * (offsets / h) ** 2) / (h * np.sqrt(2.0 * np.pi))
    full = fftconvolve(counts, kern)
    # full[j] sits at midpoint index j - half
    if config.boundary == "truncate":
        dens = full[half:half + m]
    else:
        dens = np.bincount(_reflect_index(np.arange(full.size) - half, m), weights=full, minlength=m)
    dens = np.maximum(dens, 0.0)
    return GridDensity(dens, grid.lower, grid.upper)


def _reflect_index(idx: np.ndarray, m: int) -> np.ndarray:
    period = 2 * m
    r = np.mod(idx, period)
    return np.where(r < m, r, period - 1 - r)


def plug_in(T: Functional, Ptilde: Distribution) -> float:
    return T.evaluate(Ptilde)


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    plug_in: float
    correction: float
    std_error: float
    ci_low: float
    ci_high: float
    n: int
    split: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EstimateReport":
        return cls(**json.loads(text))

    def table(self) -> str:
        rows = [
            ("estimate", f"{self.estimate:.10g}"),
            ("plug_in", f"{self.plug_in:.10g}"),
            ("correction", f"{self.correction:.10g}"),
            ("std_error", f"{self.std_error:.10g}"),
            ("ci_low", f"{self.ci_low:.10g}"),
            ("ci_high", f"{self.ci_high:.10g}"),
            ("n", str(self.n)),
            ("split", str(self.split).lower()),
        ]
        return "\n".join(f"{k:<12}{v}" for k, v in rows)


def _report(phi: np.ndarray, plug: float, split: bool) -> EstimateReport:
    n = phi.size
    est = float(np.mean(phi))
    se = float(np.std(phi, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return EstimateReport(
        estimate=est,
        plug_in=plug,
        correction=est - plug,
        std_error=se,
        ci_low=est - Z_975 * se,
        ci_high=est + Z_975 * se,
        n=n,
        split=split,
    )


def one_step(T: Functional, Ptilde: Distribution, eval_samples: SampleSet) -> EstimateReport:
    """``T(Ptilde) + mean_i IF(z_i, Ptilde)`` with a Wald 95% interval.

    Does not check that ``Ptilde`` is independent of ``eval_samples``.
    """
    if eval_samples.n == 0:
        raise DomainError("one-step estimator needs at least one evaluation point")
    phi = T.uncentered(eval_samples.points, Ptilde)
    return _report(np.atleast_1d(phi), T.evaluate(Ptilde), split=False)


def split_folds(n: int, split_seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded 50/50 partition of ``range(n)``; the second fold gets the odd element."""
    perm = make_rng(split_seed).permutation(n)
    return perm[: n // 2], perm[n // 2:]


@dataclass(frozen=True, eq=False)
class SplitFit:
    """Everything one split produces, kept for studies that need the fitted density."""

    report: EstimateReport
    initial: GridDensity
    fit_idx: np.ndarray = field(repr=False)
    eval_idx: np.ndarray = field(repr=False)


def split_fit(T: Functional, samples: SampleSet, kde: KdeConfig = KdeConfig(), split_seed: int = 0,
              grid: Grid = Grid()) -> SplitFit:
    if samples.n < 4:
        raise DomainError(f"sample splitting needs n >= 4, got {samples.n}")
    a, b = split_folds(samples.n, split_seed)
    Pt = kde_fit(samples.subset(a), grid, kde)
    rep = one_step(T, Pt, samples.subset(b))
    rep = EstimateReport(**{**rep.to_dict(), "split": True})
    return SplitFit(rep, Pt, a, b)


def split_one_step(T: Functional, samples: SampleSet, kde: KdeConfig = KdeConfig(), split_seed: int = 0,
                   grid: Grid = Grid()) -> EstimateReport:
    """Fit the KDE on one random half, average influence values over the other."""
    return split_fit(T, samples, kde, split_seed, grid).report


def crossfit_one_step(T: Functional, samples: SampleSet, kde: KdeConfig = KdeConfig(), split_seed: int = 0,
                      grid: Grid = Grid()) -> EstimateReport:
    """Two-fold cross-fitting: each half is scored under the KDE of the other half."""
    if samples.n < 4:
        raise DomainError(f"sample splitting needs n >= 4, got {samples.n}")
    a, b = split_folds(samples.n, split_seed)
    # phi is kept in sample order so that, for the mean, it is the sample itself
    phi = np.empty(samples.n)
    plugs = []
    for fit, ev in ((a, b), (b, a)):
        Pt = kde_fit(samples.subset(fit), grid, kde)
        phi[ev] = T.uncentered(samples.points[ev], Pt)
        plugs.append((T.evaluate(Pt), ev.size))
    plug = sum(v * k for v, k in plugs) / samples.n
    return _report(phi, plug, split=True)


def efficiency_bound(T: Functional, P: Distribution, n: int) -> float:
    """``Var_P(IF(Z, P)) / n``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    inf = T.influence_on_support(P)
    mu = expectation(inf, P)
    return (expectation(inf * inf, P) - mu * mu) / n


# ---------------------------------------------------------------------------
# replication study

ESTIMATORS = ("plug_in", "plug_in_split", "one_step", "one_step_crossfit")


@dataclass(frozen=True, eq=False)
class ReplicationStudy:
    """Per-replication outputs of repeated split estimation on fresh samples.

    ``plug_in`` is the natural full-sample plug-in (empirical distribution when
    the functional allows it, otherwise the full-sample KDE); ``plug_in_split``
    is ``T`` of the same half-sample KDE the one-step estimator corrects.
    """

    truth: float
    n: int
    estimates: dict
    std_errors: dict
    r2: np.ndarray
    distances: np.ndarray
    efficiency_bound: float

    @property
    def reps(self) -> int:
        return self.r2.size

    def bias(self, name: str) -> float:
        return float(np.mean(self.estimates[name]) - self.truth)

    def mc_se(self, name: str) -> float:
        return float(np.std(self.estimates[name], ddof=1) / np.sqrt(self.reps))

    def variance(self, name: str) -> float:
        if self.reps < 2:
            raise DomainError("variance needs at least 2 replications")
        return float(np.var(self.estimates[name], ddof=1))

    def mse(self, name: str) -> float:
        return float(np.mean((self.estimates[name] - self.truth) ** 2))

    def coverage(self, name: str) -> float:
        """Share of Wald intervals covering the truth.

        Plug-in rows borrow the influence-based standard error of their
        one-step counterpart, so the number shows what an interval centred at
        the uncorrected estimate would achieve.
        """
        se = self.std_errors[name]
        est = self.estimates[name]
        return float(np.mean(np.abs(est - self.truth) <= Z_975 * se))

    def summary(self) -> list[dict]:
        return [
            {
                "n": self.n,
                "estimator": name,
                "mean_bias": self.bias(name),
                "variance": self.variance(name),
                "mse": self.mse(name),
                "coverage": self.coverage(name),
            }
            for name in ESTIMATORS
        ]


def replicate(T: Functional, P: GridDensity, n: int, reps: int, kde: KdeConfig, seed: int,
              grid: Optional[Grid] = None) -> ReplicationStudy:
    """Draw ``reps`` samples of size ``n`` from ``P`` and run every estimator on each.

    Replication ``r`` samples with seed ``seed + r`` and splits with the same seed.
    """
    if reps < 1:
        raise DomainError("need at least one replication")
    grid = grid or P.grid
    truth = T.evaluate(P)
    est = {k: np.empty(reps) for k in ESTIMATORS}
    se = {k: np.empty(reps) for k in ESTIMATORS}
    r2 = np.empty(reps)
    dist = np.empty(reps)
    for r in range(reps):
        s = sample(P, n, seed + r)
        sf = split_fit(T, s, kde, seed + r, grid)
        cf = crossfit_one_step(T, s, kde, seed + r, grid)
        est["one_step"][r] = sf.report.estimate
        se["one_step"][r] = sf.report.std_error
        est["one_step_crossfit"][r] = cf.estimate
        se["one_step_crossfit"][r] = cf.std_error
        est["plug_in_split"][r] = sf.report.plug_in
        se["plug_in_split"][r] = sf.report.std_error
        se["plug_in"][r] = cf.std_error
        if T.empirical is not None:
            est["plug_in"][r] = T.empirical(s.points)
        else:
            est["plug_in"][r] = T.evaluate(kde_fit(s, grid, kde))
        path = Path(P, sf.initial)
        r2[r] = exact_r2(path, T)
        dist[r] = path.distance
    return ReplicationStudy(truth, n, est, se, r2, dist, efficiency_bound(T, P, n))
