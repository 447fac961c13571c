"""Grid densities, discrete distributions and the primitives built on them.

Continuous densities live on a uniform midpoint grid over ``[lower, upper]``
and integrals are midpoint sums.  Discrete distributions use the counting
measure, so the same code (``density * measure`` summed) serves both cases.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from .errors import DomainError, ShapeError

DEFAULT_M = 4096
NORMALIZATION_TOL = 1e-10
MASS_TOL = 1e-12


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator; every stochastic routine goes through here."""
    return np.random.Generator(np.random.Philox(int(seed)))


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform midpoint grid of ``m`` cells on ``[lower, upper]``."""

    lower: float = 0.0
    upper: float = 1.0
    m: int = DEFAULT_M

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise DomainError("grid bounds must be finite")
        if not self.lower < self.upper:
            raise DomainError(f"need lower < upper, got [{self.lower}, {self.upper}]")
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"grid resolution must be an integer >= 2, got {self.m}")

    @property
    def dz(self) -> float:
        return (self.upper - self.lower) / self.m

    @cached_property
    def midpoints(self) -> np.ndarray:
        return _frozen(self.lower + self.dz * (np.arange(self.m) + 0.5))

    @cached_property
    def edges(self) -> np.ndarray:
        return _frozen(self.lower + self.dz * np.arange(self.m + 1))

    def check_contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if np.any(z < self.lower) or np.any(z > self.upper) or np.any(~np.isfinite(z)):
            raise DomainError(f"point(s) outside the grid interval [{self.lower}, {self.upper}]")
        return z


class GridDensity:
    """Probability density stored as heights at the cell midpoints of a :class:`Grid`.

    Values are rescaled at construction so the midpoint sum equals one.
    """

    measure_kind = "lebesgue"

    def __init__(self, values, lower: float = 0.0, upper: float = 1.0):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1:
            raise ShapeError("density values must be a 1-D vector")
        grid = Grid(float(lower), float(upper), values.size)
        if np.any(~np.isfinite(values)) or np.any(values < 0):
            raise DomainError("density values must be finite and nonnegative")
        total = values.sum() * grid.dz
        if total <= 0:
            raise DomainError("density has zero total mass")
        self._grid = grid
        self._values = _frozen(values / total)

    @classmethod
    def _trusted(cls, values: np.ndarray, grid: Grid) -> "GridDensity":
        # skips renormalization; used by mix so endpoints come back bit-exact
        obj = cls.__new__(cls)
        obj._grid = grid
        obj._values = _frozen(values)
        return obj

    @classmethod
    def from_function(cls, f, m: int = DEFAULT_M, lower: float = 0.0, upper: float = 1.0):
        grid = Grid(lower, upper, m)
        return cls(f(np.asarray(grid.midpoints)), lower, upper)

    @classmethod
    def uniform(cls, m: int = DEFAULT_M, lower: float = 0.0, upper: float = 1.0):
        return cls(np.ones(m), lower, upper)

    grid = property(lambda self: self._grid)
    values = property(lambda self: self._values)
    lower = property(lambda self: self._grid.lower)
    upper = property(lambda self: self._grid.upper)
    m = property(lambda self: self._grid.m)

    # common distribution interface
    support = property(lambda self: self._grid.midpoints)
    density = property(lambda self: self._values)
    measure = property(lambda self: self._grid.dz)

    def same_support(self, other) -> bool:
        return isinstance(other, GridDensity) and other._grid == self._grid

    def __call__(self, z):
        """Density at arbitrary points, linear between midpoints and clipped at zero."""
        z = self._grid.check_contains(z)
        mids, vals, dz = self._grid.midpoints, self._values, self._grid.dz
        out = np.interp(z, mids, vals)
        lo = z < mids[0]
        hi = z > mids[-1]
        out = np.where(lo, vals[0] + (z - mids[0]) * (vals[1] - vals[0]) / dz, out)
        out = np.where(hi, vals[-1] + (z - mids[-1]) * (vals[-1] - vals[-2]) / dz, out)
        out = np.maximum(out, 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf_at_edges(self) -> np.ndarray:
        cdf = np.concatenate([[0.0], np.cumsum(self._values * self._grid.dz)])
        cdf /= cdf[-1]
        return cdf

    def __eq__(self, other):
        return self.same_support(other) and np.array_equal(self._values, other._values)

    __hash__ = None

    def __repr__(self):
        return f"GridDensity(m={self.m}, lower={self.lower}, upper={self.upper})"


class DiscreteDist:
    """Probability mass function over ``K >= 2`` labelled atoms."""

    measure_kind = "counting"

    def __init__(self, masses, atoms=None):
        masses = np.asarray(masses, dtype=float)
        if masses.ndim != 1 or masses.size < 2:
            raise ShapeError("need a 1-D vector of at least 2 masses")
        if np.any(~np.isfinite(masses)) or np.any(masses < 0):
            raise DomainError("masses must be finite and nonnegative")
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise DomainError(f"masses sum to {masses.sum()!r}, not 1")
        if atoms is None:
            atoms = np.arange(masses.size)
        atoms = np.asarray(atoms)
        if atoms.shape != masses.shape:
            raise ShapeError("atoms and masses must have the same length")
        if len(set(atoms.tolist())) != atoms.size:
            raise DomainError("atom labels must be distinct")
        atoms = atoms.copy()
        atoms.flags.writeable = False
        self._atoms = atoms
        self._masses = _frozen(masses)

    @classmethod
    def _trusted(cls, masses: np.ndarray, atoms: np.ndarray) -> "DiscreteDist":
        obj = cls.__new__(cls)
        obj._atoms = atoms
        obj._masses = _frozen(masses)
        return obj

    @classmethod
    def point_mass(cls, atoms, k: int) -> "DiscreteDist":
        atoms = np.asarray(atoms)
        masses = np.zeros(atoms.size)
        masses[k] = 1.0
        return cls(masses, atoms)

    atoms = property(lambda self: self._atoms)
    masses = property(lambda self: self._masses)
    K = property(lambda self: self._masses.size)

    support = property(lambda self: self._atoms)
    density = property(lambda self: self._masses)
    measure = 1.0

    def same_support(self, other) -> bool:
        return isinstance(other, DiscreteDist) and np.array_equal(other._atoms, self._atoms)

    def index_of(self, z) -> np.ndarray:
        """Positions of ``z`` (scalar or array of labels) within the atom vector."""
        lookup = {a: i for i, a in enumerate(self._atoms.tolist())}
        zs = np.atleast_1d(np.asarray(z))
        try:
            idx = np.array([lookup[v] for v in zs.tolist()], dtype=int)
        except KeyError as exc:
            raise DomainError(f"value {exc.args[0]!r} is not one of the atoms") from None
        return idx

    def __call__(self, z):
        idx = self.index_of(z)
        out = self._masses[idx]
        return float(out[0]) if np.ndim(z) == 0 else out

    def __eq__(self, other):
        return self.same_support(other) and np.array_equal(self._masses, other._masses)

    __hash__ = None

    def __repr__(self):
        return f"DiscreteDist(masses={self._masses.tolist()}, atoms={self._atoms.tolist()})"


Distribution = Union[GridDensity, DiscreteDist]


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``n`` draws together with the seed that produced them."""

    points: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        pts = np.array(self.points)
        if pts.ndim != 1:
            raise ShapeError("sample points must be a 1-D vector")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.size

    def __len__(self):
        return self.points.size

    def subset(self, idx) -> "SampleSet":
        return SampleSet(self.points[idx], self.seed)


def check_same_support(a, b) -> None:
    if type(a) is not type(b) or not a.same_support(b):
        raise ShapeError(f"distributions do not share a grid / atom set: {a!r} vs {b!r}")


def mix(P: Distribution, Ptilde: Distribution, eps: float) -> Distribution:
    """Pointwise convex combination ``(1 - eps) * p + eps * ptilde``."""
    check_same_support(P, Ptilde)
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"mixing weight must lie in [0, 1], got {eps}")
    dens = (1.0 - eps) * P.density + eps * Ptilde.density
    if isinstance(P, GridDensity):
        return GridDensity._trusted(dens, P.grid)
    return DiscreteDist._trusted(dens, P.atoms)


def integrate(f, grid) -> float:
    """Midpoint-rule integral of grid values ``f`` (a plain sum for discrete supports).

    ``grid`` may be a :class:`Grid` or any distribution, whose support supplies the measure.
    """
    f = np.asarray(f, dtype=float)
    if isinstance(grid, Grid):
        m, w = grid.m, grid.dz
    else:
        m, w = np.size(grid.support), grid.measure
    if f.shape != (m,):
        raise ShapeError(f"integrand has shape {f.shape}, expected ({m},)")
    return float(f.sum() * w)


def expectation(f, G: Distribution) -> float:
    """``E_G f(Z)`` for ``f`` given on the support of ``G``."""
    return integrate(np.asarray(f, dtype=float) * G.density, G)


def l2_distance(A: Distribution, B: Distribution) -> float:
    check_same_support(A, B)
    diff = A.density - B.density
    return float(np.sqrt(integrate(diff * diff, A)))


def sample(P: Distribution, n: int, seed: int) -> SampleSet:
    """Draw ``n`` points by inverting the (piecewise-linear) grid CDF.

    Discrete distributions return atom labels.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    u = make_rng(seed).random(int(n))
    if isinstance(P, GridDensity):
        cdf = P.cdf_at_edges()
        idx = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, P.m - 1)
        cell_mass = cdf[idx + 1] - cdf[idx]
        frac = np.divide(u - cdf[idx], cell_mass, out=np.full(u.shape, 0.5), where=cell_mass > 0)
        pts = P.grid.edges[idx] + np.clip(frac, 0.0, 1.0) * P.grid.dz
        pts = np.clip(pts, P.lower, P.upper)
    else:
        cum = np.cumsum(P.masses)
        cum[-1] = 1.0
        idx = np.minimum(np.searchsorted(cum, u, side="right"), P.K - 1)
        pts = P.atoms[idx]
    return SampleSet(pts, int(seed))


def empirical_pmf(samples: SampleSet, atoms) -> DiscreteDist:
    """Mass ``count / n`` at each atom."""
    atoms = np.asarray(atoms)
    ref = DiscreteDist.point_mass(atoms, 0)
    idx = ref.index_of(samples.points)
    counts = np.bincount(idx, minlength=atoms.size)
    return DiscreteDist._trusted(counts / counts.sum(), ref.atoms)
