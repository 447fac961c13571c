"""Statistical functionals paired with their analytic influence functions.

Two functionals ship: the integrated squared density (``"isd"``), whose
mixture-path curve is exactly quadratic, and the mean (``"mean"``), which is
linear in the density and therefore has no second-order remainder.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dist import DiscreteDist, Distribution, GridDensity, check_same_support, expectation, integrate
from .errors import DomainError, UnsupportedError

DEFAULT_FD_STEP = 1e-4


@dataclass(frozen=True)
class Functional:
    """A map ``T`` from distributions to reals together with ``IF(z, G)``.

    ``partials`` gives the raw coordinate partials ``dT/dp_k`` on a discrete
    support (only needed by the chain-rule derivative).  ``pseudo_outcome``
    may supply ``T(G) + IF(z, G)`` in simplified closed form; when absent it
    is computed as that sum.  ``empirical`` evaluates ``T`` at the empirical
    distribution of raw sample points, for functionals where that is defined.
    """

    name: str
    evaluate: Callable[[Distribution], float]
    influence: Callable
    partials: Optional[Callable[[Distribution], np.ndarray]] = None
    pseudo_outcome: Optional[Callable] = None
    empirical: Optional[Callable[[np.ndarray], float]] = None

    def __call__(self, P: Distribution) -> float:
        return self.evaluate(P)

    def influence_on_support(self, G: Distribution) -> np.ndarray:
        """``IF(z, G)`` at every grid midpoint or atom of ``G``."""
        return np.asarray(self.influence(G.support, G), dtype=float)

    def uncentered(self, z, G: Distribution) -> np.ndarray:
        if self.pseudo_outcome is not None:
            return np.asarray(self.pseudo_outcome(z, G), dtype=float)
        return self.evaluate(G) + np.asarray(self.influence(z, G), dtype=float)


def _signed_combination(G: Distribution, Q: Distribution, eps: float) -> Distribution:
    # G + eps (Q - G) for any real eps; may leave the simplex, which is fine
    # for functionals defined algebraically on the density vector
    dens = G.density + eps * (Q.density - G.density)
    if isinstance(G, GridDensity):
        return GridDensity._trusted(dens, G.grid)
    return DiscreteDist._trusted(dens, G.atoms)


def _numeric_support(G: Distribution) -> np.ndarray:
    sup = np.asarray(G.support)
    if sup.dtype.kind not in "biuf":
        raise UnsupportedError("the mean functional needs numeric atoms")
    return sup.astype(float)


# ---------------------------------------------------------------------------
# integrated squared density

def isd_evaluate(P: Distribution) -> float:
    """``int p(z)^2 dz`` (midpoint rule) or ``sum_k p_k^2`` on atoms."""
    return integrate(P.density * P.density, P)


def isd_influence(z, G: Distribution):
    """``IF(z, G) = 2 (g(z) - T(G))``."""
    return 2.0 * (G(z) - isd_evaluate(G))


def isd_partials(G: Distribution) -> np.ndarray:
    return 2.0 * np.asarray(G.density)


# ---------------------------------------------------------------------------
# mean

def mean_evaluate(P: Distribution) -> float:
    return integrate(_numeric_support(P) * P.density, P)


def mean_influence(z, G: Distribution):
    """``IF(z, G) = z - E_G[Z]``."""
    z = _checked_points(z, G)
    return z - mean_evaluate(G)


def _checked_points(z, G: Distribution):
    if isinstance(G, GridDensity):
        z = G.grid.check_contains(z)
    else:
        G.index_of(z)
        z = np.asarray(z, dtype=float)
    return float(z) if np.ndim(z) == 0 else z


def mean_pseudo_outcome(z, G: Distribution):
    # E_G[Z] + (z - E_G[Z]) simplifies to z; keeps the one-step estimate bit-exact
    return _checked_points(z, G)


def mean_partials(G: Distribution) -> np.ndarray:
    return _numeric_support(G) * G.measure


ISD = Functional("isd", isd_evaluate, isd_influence, isd_partials)
MEAN = Functional(
    "mean", mean_evaluate, mean_influence, mean_partials, mean_pseudo_outcome,
    empirical=lambda pts: float(np.mean(np.asarray(pts, dtype=float))),
)

REGISTRY = {f.name: f for f in (ISD, MEAN)}


def get_functional(name: str) -> Functional:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnsupportedError(f"unknown functional {name!r}; choose from {sorted(REGISTRY)}") from None


# ---------------------------------------------------------------------------
# derivative checks

def gateaux_fd(T: Functional, G: Distribution, Q: Distribution, h: float = DEFAULT_FD_STEP) -> float:
    """Central-difference derivative of ``eps -> T(G + eps (Q - G))`` at ``eps = 0``.

    Independent of ``T.influence``; used as the oracle for influence checks.
    """
    check_same_support(G, Q)
    if not 0.0 < h < 0.5:
        raise DomainError(f"finite-difference step must lie in (0, 0.5), got {h}")
    up = T.evaluate(_signed_combination(G, Q, h))
    down = T.evaluate(_signed_combination(G, Q, -h))
    return (up - down) / (2.0 * h)


def influence_derivative(T: Functional, G: Distribution, Q: Distribution) -> float:
    """``int IF(z, G) {q(z) - g(z)} dz``: the Gateaux derivative predicted by the IF."""
    check_same_support(G, Q)
    return integrate(T.influence_on_support(G) * (Q.density - G.density), G)


def influence_centering_residual(T: Functional, G: Distribution) -> float:
    """``int IF(z, G) g(z) dz``, zero for a properly centred influence function."""
    return expectation(T.influence_on_support(G), G)
