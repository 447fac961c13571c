"""Score-based influence checks on mixture likelihood paths, and the chain rule.

Along ``W_e = G + e (Q - G)`` the score at ``e = 0`` is ``(q - g) / g``, so the
score-based characterisation ``E_G[IF s_0]`` reduces to ``int IF (q - g)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dist import DiscreteDist, Distribution, check_same_support, integrate
from .errors import SupportError, UnsupportedError
from .functionals import DEFAULT_FD_STEP, Functional, gateaux_fd

DENSITY_FLOOR = 1e-12
FLAGGED_MASS_TOL = 1e-6


def score_at_zero(G: Distribution, Q: Distribution, floor: float = DENSITY_FLOOR):
    """``(q - g) / max(g, floor)`` and a mask of the floored points."""
    check_same_support(G, Q)
    g = np.asarray(G.density)
    flagged = g < floor
    return (Q.density - g) / np.maximum(g, floor), flagged


@dataclass(frozen=True, eq=False)
class ScorePathCheck:
    G: Distribution
    Q: Distribution
    score0: np.ndarray
    lhs: float
    rhs: float
    residual: float
    flagged_mass: float = 0.0

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "flagged_mass": self.flagged_mass,
            "score0": np.asarray(self.score0).tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def score_identity_check(T: Functional, G: Distribution, Q: Distribution, h: float = DEFAULT_FD_STEP,
                         floor: float = DENSITY_FLOOR, mass_tol: float = FLAGGED_MASS_TOL) -> ScorePathCheck:
    """Compare the finite-difference path derivative with ``E_G[IF(Z, G) s_0(Z)]``.

    Raises :class:`SupportError` when more than ``mass_tol`` of ``|q - g|``
    sits where ``g`` had to be floored.
    """
    s0, flagged = score_at_zero(G, Q, floor)
    flagged_mass = integrate(np.where(flagged, np.abs(Q.density - G.density), 0.0), G)
    if flagged_mass > mass_tol:
        raise SupportError(f"mass {flagged_mass:.3g} of |q - g| lies where g < {floor}")
    lhs = gateaux_fd(T, G, Q, h)
    rhs = integrate(T.influence_on_support(G) * s0 * G.density, G)
    return ScorePathCheck(G, Q, s0, float(lhs), float(rhs), float(abs(lhs - rhs)), float(flagged_mass))


def discrete_chain_rule_derivative(P: DiscreteDist, Ptilde: DiscreteDist, T: Functional) -> float:
    """``sum_k dT/dp_k (Ptilde) * (ptilde_k - p_k)``, the coordinate chain rule at ``eps = 1``.

    The coordinate partials step off the simplex; the formula is only
    meaningful because ``sum_k (ptilde_k - p_k) = 0`` cancels any constant
    shift in them.
    """
    check_same_support(P, Ptilde)
    if not isinstance(P, DiscreteDist):
        raise UnsupportedError("the chain-rule derivative is defined for discrete distributions")
    if T.partials is None:
        raise UnsupportedError(f"functional {T.name!r} does not supply coordinate partials")
    return float(np.dot(T.partials(Ptilde), Ptilde.masses - P.masses))
