"""Mixture paths between a target distribution and an initial estimate.

The path runs ``P_eps = (1 - eps) P + eps Ptilde``: ``eps = 0`` is the truth
and ``eps = 1`` the estimate.  The one-step value is the intercept at
``eps = 0`` of the tangent line drawn at ``eps = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dist import Distribution, check_same_support, integrate, l2_distance, mix
from .errors import DegeneratePathError, DomainError
from .functionals import Functional

DEFAULT_EPS_POINTS = 101
BOUNDARY_FD_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class Path:
    target: Distribution
    initial: Distribution
    distance: float = field(init=False)

    def __post_init__(self):
        check_same_support(self.target, self.initial)
        object.__setattr__(self, "distance", l2_distance(self.target, self.initial))

    def at(self, eps: float) -> Distribution:
        return mix(self.target, self.initial, eps)

    def reversed(self) -> "Path":
        return Path(self.initial, self.target)

    @property
    def degenerate(self) -> bool:
        return self.distance == 0.0


@dataclass(frozen=True, eq=False)
class VCurve:
    eps: np.ndarray
    values: np.ndarray
    deltas: np.ndarray

    def __len__(self):
        return self.eps.size


def v_curve(path: Path, T: Functional, grid_size: int = DEFAULT_EPS_POINTS) -> VCurve:
    """``T(P_eps)`` on a uniform eps grid including both endpoints."""
    if int(grid_size) != grid_size or grid_size < 3:
        raise DomainError(f"need at least 3 eps points, got {grid_size}")
    eps = np.linspace(0.0, 1.0, int(grid_size))
    values = np.array([T.evaluate(path.at(e)) for e in eps])
    return VCurve(eps, values, eps * path.distance)


def pathwise_derivative_at_one(path: Path, T: Functional) -> float:
    """``v'(1) = -int IF(z, Ptilde) {p(z) - ptilde(z)} dz``."""
    P, Pt = path.target, path.initial
    return -integrate(T.influence_on_support(Pt) * (P.density - Pt.density), Pt)


def fd_derivative_at_one(path: Path, T: Functional, h: float = BOUNDARY_FD_STEP) -> float:
    """Second-order one-sided difference of ``v`` at ``eps = 1`` (eps cannot exceed 1)."""
    if not 0.0 < h <= 0.25:
        raise DomainError(f"step must lie in (0, 0.25], got {h}")
    v1 = T.evaluate(path.at(1.0))
    v_1 = T.evaluate(path.at(1.0 - h))
    v_2 = T.evaluate(path.at(1.0 - 2.0 * h))
    return (3.0 * v1 - 4.0 * v_1 + v_2) / (2.0 * h)


def one_step_intercept(path: Path, T: Functional) -> float:
    """Population one-step value ``T(Ptilde) - v'(1)``."""
    return T.evaluate(path.initial) - pathwise_derivative_at_one(path, T)


def exact_r2(path: Path, T: Functional) -> float:
    """Remainder ``one_step_intercept - T(P)``; equals ``-||P - Ptilde||^2`` for isd."""
    return one_step_intercept(path, T) - T.evaluate(path.target)


def tangent(path: Path, T: Functional, eps) -> np.ndarray:
    """Tangent line to ``v`` at ``eps = 1`` evaluated at ``eps``."""
    eps = np.asarray(eps, dtype=float)
    return T.evaluate(path.initial) + pathwise_derivative_at_one(path, T) * (eps - 1.0)


def rescale(path: Path, delta: float) -> float:
    """Mixing weight whose distribution sits at L2 distance ``delta`` from the target."""
    if path.degenerate:
        raise DegeneratePathError("path endpoints coincide; distance reindexing is undefined")
    if not 0.0 <= delta <= path.distance:
        raise DomainError(f"delta must lie in [0, {path.distance}], got {delta}")
    return min(delta / path.distance, 1.0)


class QuadraticFit(NamedTuple):
    c0: float
    c1: float
    c2: float
    max_residual: float


def quadratic_fit(curve: VCurve) -> QuadraticFit:
    """Least-squares ``v(eps) ~ c0 + c1 eps + c2 eps^2``.

    The fit is done in ``x = eps - 0.5`` through the normal equations and
    mapped back to powers of eps.
    """
    eps = np.asarray(curve.eps, dtype=float)
    v = np.asarray(curve.values, dtype=float)
    if eps.size < 3:
        raise DomainError("quadratic fit needs at least 3 points")
    x = eps - 0.5
    X = np.vander(x, 3, increasing=True)
    a0, a1, a2 = np.linalg.solve(X.T @ X, X.T @ v)
    fitted = X @ np.array([a0, a1, a2])
    # x^2 = eps^2 - eps + 1/4
    c2 = a2
    c1 = a1 - a2
    c0 = a0 - 0.5 * a1 + 0.25 * a2
    return QuadraticFit(float(c0), float(c1), float(c2), float(np.max(np.abs(v - fitted))))
