"""Named densities and direction catalogs used by the command line and demos.

Grid presets: ``beta22`` (6z(1-z)), ``uniform``, ``linear`` (2z) and ``twobump``
(equal mixture of normals at 0.3 and 0.7 with sd 0.1, renormalized on the
grid).  The form ``mix(A,B,w)`` builds ``(1 - w) A + w B`` from two such forms,
``pmf(0.5,0.3,0.2)`` a discrete distribution on atoms 0..K-1, and anything
else is read as a CSV/JSON file.  The shapes are illustrative choices only.
"""
from __future__ import annotations

import re

import numpy as np

from .dist import DEFAULT_M, DiscreteDist, Distribution, GridDensity, mix
from .errors import ConfigError


def _normal(z, mu, sd):
    return np.exp(-0.5 * ((z - mu) / sd) ** 2) / (sd * np.sqrt(2 * np.pi))


GRID_PRESETS = {
    "beta22": lambda z: 6.0 * z * (1.0 - z),
    "uniform": lambda z: np.ones_like(z),
    "linear": lambda z: 2.0 * z,
    "twobump": lambda z: 0.5 * _normal(z, 0.3, 0.1) + 0.5 * _normal(z, 0.7, 0.1),
}

_MIX_RE = re.compile(r"^mix\((.+),\s*([-+0-9.eE]+)\)$")
_PMF_RE = re.compile(r"^pmf\((.+)\)$")


def grid_preset(name: str, m: int = DEFAULT_M, lower: float = 0.0, upper: float = 1.0) -> GridDensity:
    try:
        f = GRID_PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown density preset {name!r}; choose from {sorted(GRID_PRESETS)}") from None
    return GridDensity.from_function(f, m, lower, upper)


def _split_top_level(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def parse_pmf(text: str) -> DiscreteDist:
    try:
        masses = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse masses {text!r}") from None
    return DiscreteDist(masses)


def resolve(form: str, m: int = DEFAULT_M, lower: float = 0.0, upper: float = 1.0) -> Distribution:
    """Turn a preset name, ``mix(...)``, ``pmf(...)`` or file path into a distribution."""
    form = form.strip()
    if form in GRID_PRESETS:
        return grid_preset(form, m, lower, upper)
    mm = _MIX_RE.match(form)
    if mm:
        parts = _split_top_level(mm.group(1))
        if len(parts) != 2:
            raise ConfigError(f"mix() takes two distributions and a weight: {form!r}")
        a = resolve(parts[0], m, lower, upper)
        b = resolve(parts[1], m, lower, upper)
        return mix(a, b, float(mm.group(2)))
    pm = _PMF_RE.match(form)
    if pm:
        return parse_pmf(pm.group(1))
    from .io import load_distribution

    P = load_distribution(form)
    if isinstance(P, GridDensity) and P.m != m:
        raise ConfigError(f"{form}: file grid has m={P.m}, run uses m={m}")
    return P


def direction_catalog(m: int = DEFAULT_M) -> dict:
    """Fixed grid directions for rate sweeps."""
    return {name: grid_preset(name, m) for name in ("uniform", "linear", "twobump", "beta22")}


def discrete_perturbations(P: DiscreteDist, count: int, seed: int, scale: float = 0.5) -> list:
    """``count`` directions ``Q`` on the atoms of ``P``: Dirichlet draws shrunk toward ``P``."""
    from .dist import make_rng

    rng = make_rng(seed)
    out = []
    for _ in range(count):
        d = rng.dirichlet(np.ones(P.K))
        q = (1 - scale) * P.masses + scale * d
        out.append(DiscreteDist(q / q.sum(), P.atoms))
    return out
