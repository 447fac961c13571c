"""``onestep`` command line: figure data, simulations and rate studies from a config file.

Exit codes: 0 on success, 2 for configuration problems, 3 for numerical or
domain errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path as FsPath

import numpy as np

from .config import RunConfig, load_config
from .dist import DiscreteDist, Distribution, GridDensity, l2_distance
from .errors import ConfigError, DomainError, OneStepError, UnsupportedError
from .estimators import ESTIMATORS, replicate
from .functionals import get_functional
from .io import table_to_csv, write_atomic
from .paths import Path, one_step_intercept, pathwise_derivative_at_one, tangent, v_curve
from .presets import resolve
from .rates import direction_sweep, kde_rate_sweep
from .svg import Heatmap, Series, svg_render

log = logging.getLogger("onestep")

OUT_ENV = "ONESTEP_OUT"
DEFAULT_OUT = "onestep_out"
DENSITY_EPS = (0.0, 0.25, 0.5, 0.75, 1.0)
COMMANDS = ("path", "multipath", "simplex", "simulate", "rates")


def output_dir(cfg: RunConfig) -> FsPath:
    out = cfg.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
    return FsPath(out)


def _resolve(cfg: RunConfig, form: str) -> Distribution:
    try:
        return resolve(form, cfg.grid_m)
    except ConfigError:
        raise
    except (OneStepError, ValueError) as e:
        raise ConfigError(f"cannot build distribution from {form!r}: {e}") from None


def _target_and_initials(cfg: RunConfig):
    P = _resolve(cfg, cfg.target)
    initials = [_resolve(cfg, s) for s in cfg.initial]
    for form, Pt in zip(cfg.initial, initials):
        if not P.same_support(Pt):
            raise ConfigError(f"initial {form!r} is not on the target's support")
    return P, initials


def _require_seed(cfg: RunConfig, command: str) -> int:
    if cfg.seed is None:
        raise ConfigError(f"'{command}' is stochastic: pass --seed N (or set seed in [run])")
    return cfg.seed


def _label(eps: float) -> str:
    return f"p_eps_{eps:g}"


def cmd_path(cfg: RunConfig) -> dict:
    P, initials = _target_and_initials(cfg)
    if len(initials) != 1:
        raise ConfigError(f"'path' needs exactly one initial distribution, got {len(initials)}")
    T = get_functional(cfg.functional)
    path = Path(P, initials[0])
    out = output_dir(cfg)

    dens = [path.at(e).density for e in DENSITY_EPS]
    header = ["z"] + [_label(e) for e in DENSITY_EPS]
    write_atomic(out / "fig1_densities.csv", table_to_csv(header, zip(P.support, *dens)))

    curve = v_curve(path, T, cfg.eps_points)
    tan = tangent(path, T, curve.eps)
    icpt = one_step_intercept(path, T)
    rows = zip(curve.eps, curve.deltas, curve.values, tan, [icpt] * len(curve))
    write_atomic(out / "fig1_vcurve.csv",
                 table_to_csv(["eps", "delta", "value", "tangent_value", "one_step_intercept"], rows))

    series = [
        Series(curve.eps, curve.values, "v(eps)"),
        Series(curve.eps, tan, "tangent at eps=1", dashed=True),
        Series([0.0], [icpt], "one-step intercept", marker=True),
    ]
    svg_render(series, "line", out / "fig1.svg", title=f"{T.name} along the mixture path",
               xlabel=f"eps (distance = eps x {path.distance:.4g})", ylabel="T(P_eps)")
    return {
        "files": [str(out / f) for f in ("fig1_densities.csv", "fig1_vcurve.csv", "fig1.svg")],
        "one_step_intercept": icpt,
        "derivative_at_one": pathwise_derivative_at_one(path, T),
        "distance": path.distance,
    }


def cmd_multipath(cfg: RunConfig) -> dict:
    P, initials = _target_and_initials(cfg)
    if len(initials) < 2:
        raise ConfigError(f"'multipath' needs at least two initial distributions, got {len(initials)}")
    T = get_functional(cfg.functional)
    out = output_dir(cfg)
    rows, series, skipped, intercepts = [], [], [], {}
    for k, (form, Pt) in enumerate(zip(cfg.initial, initials)):
        path = Path(P, Pt)
        if path.degenerate:
            log.warning("skipping path %d (%s): initial equals target", k, form)
            skipped.append(k)
            continue
        curve = v_curve(path, T, cfg.eps_points)
        tan = tangent(path, T, curve.eps)
        icpt = one_step_intercept(path, T)
        intercepts[k] = icpt
        rows.extend((k, form, e, d, v, t, icpt) for e, d, v, t in zip(curve.eps, curve.deltas, curve.values, tan))
        series.append(Series(curve.deltas, curve.values, f"path {k}"))
        series.append(Series(curve.deltas, tan, f"tangent {k}", dashed=True))
    if not rows:
        raise ConfigError("every configured path is degenerate")
    header = ["path_id", "initial", "eps", "distance_from_P", "value", "tangent", "intercept"]
    write_atomic(out / "fig2_curves.csv", table_to_csv(header, rows))
    svg_render(series, "line", out / "fig2.svg", title=f"{T.name}: tangents from several initial estimates",
               xlabel="distance from P", ylabel="T")
    return {"files": [str(out / "fig2_curves.csv"), str(out / "fig2.svg")],
            "skipped": skipped, "intercepts": intercepts}


def simplex_surface(resolution: int) -> np.ndarray:
    """Rows ``(q1, q2, T)`` with ``T = q1^2 + q2^2 + q3^2`` over the lattice ``q1 + q2 <= 1``."""
    r = resolution - 1
    i, j = np.meshgrid(np.arange(r + 1), np.arange(r + 1), indexing="ij")
    keep = i + j <= r
    i, j = i[keep], j[keep]
    q1, q2, q3 = i / r, j / r, (r - i - j) / r
    return np.column_stack([q1, q2, q1 * q1 + q2 * q2 + q3 * q3])


def cmd_simplex(cfg: RunConfig) -> dict:
    if cfg.functional != "isd":
        raise UnsupportedError("the simplex figure is drawn for the isd functional only")
    P, initials = _target_and_initials(cfg)
    for D in (P, *initials):
        if not isinstance(D, DiscreteDist) or D.K != 3:
            raise UnsupportedError("the simplex figure needs discrete distributions on 3 atoms")
    T = get_functional("isd")
    out = output_dir(cfg)
    surf = simplex_surface(cfg.simplex_resolution)
    write_atomic(out / "fig3_surface.csv", table_to_csv(["q1", "q2", "T"], surf))

    eps = np.linspace(0.0, 1.0, cfg.eps_points)
    rows, overlays = [], []
    p1, p2 = P.masses[0], P.masses[1]
    for k, Pt in enumerate(initials):
        path = Path(P, Pt)
        if path.degenerate:
            log.warning("skipping path %d: initial equals target", k)
            continue
        q1s, q2s = [], []
        for e in eps:
            W = path.at(e)
            q1, q2 = W.masses[0], W.masses[1]
            rows.append((k, e, q1, q2, T.evaluate(W), float(np.hypot(q1 - p1, q2 - p2)), l2_distance(P, W)))
            q1s.append(q1)
            q2s.append(q2)
        overlays.append(Series(q1s, q2s, f"path {k}"))
    write_atomic(out / "fig3_paths.csv",
                 table_to_csv(["path_id", "eps", "q1", "q2", "T", "dist2d", "dist_l2"], rows))
    overlays.append(Series([p1], [p2], "P", marker=True, color="#000000"))
    svg_render(Heatmap(surf[:, 0], surf[:, 1], surf[:, 2], "sum of squared masses", overlays), "heatmap",
               out / "fig3.svg", title="Distributions on three atoms", xlabel="q1", ylabel="q2")
    return {"files": [str(out / f) for f in ("fig3_surface.csv", "fig3_paths.csv", "fig3.svg")],
            "minimum": float(surf[:, 2].min())}


def cmd_simulate(cfg: RunConfig) -> dict:
    seed = _require_seed(cfg, "simulate")
    if cfg.sim_reps < 2:
        raise DomainError("reps must be at least 2 for the variance to be defined")
    P = _resolve(cfg, cfg.target)
    if not isinstance(P, GridDensity):
        raise UnsupportedError("simulations need a grid density target")
    T = get_functional(cfg.functional)
    out = output_dir(cfg)
    rows, bounds, ratios = [], {}, {}
    truth = T.evaluate(P)
    for n in cfg.sim_n:
        study = replicate(T, P, n, cfg.sim_reps, cfg.kde, seed)
        rows.extend(study.summary())
        bounds[str(n)] = study.efficiency_bound
        ratios[str(n)] = {k: study.mse(k) / study.efficiency_bound for k in ESTIMATORS}
    header = ["n", "estimator", "mean_bias", "variance", "mse", "coverage"]
    write_atomic(out / "sim_table.csv", table_to_csv(header, ([r[h] for h in header] for r in rows)))
    summary = {
        "functional": T.name,
        "target": cfg.target,
        "truth": truth,
        "seed": seed,
        "reps": cfg.sim_reps,
        "kde": asdict(cfg.kde),
        "efficiency_bound": bounds,
        "mse_over_bound": ratios,
        "rows": rows,
    }
    write_atomic(out / "sim_summary.json", json.dumps(summary, indent=2) + "\n")
    return {"files": [str(out / "sim_table.csv"), str(out / "sim_summary.json")], **summary}


def cmd_rates(cfg: RunConfig) -> dict:
    P = _resolve(cfg, cfg.target)
    T = get_functional(cfg.functional)
    out = output_dir(cfg)
    meta = {"mode": cfg.rates_mode, "functional": T.name, "target": cfg.target}
    if cfg.rates_mode == "direction":
        if not 0 < cfg.rates_t_max <= 1:
            raise ConfigError(f"[rates] t_max must lie in (0, 1], got {cfg.rates_t_max}")
        Q = _resolve(cfg, cfg.rates_direction)
        t = cfg.rates_t_max * 2.0 ** -np.arange(cfg.rates_t_count)
        res = direction_sweep(P, Q, T, t)
        meta["direction"] = cfg.rates_direction
    else:
        seed = _require_seed(cfg, "rates")
        if not isinstance(P, GridDensity):
            raise UnsupportedError("KDE rate sweeps need a grid density target")
        res = kde_rate_sweep(P, T, cfg.rates_n, cfg.rates_reps, cfg.kde, seed)
        meta.update(seed=seed, kde=asdict(cfg.kde))
    write_atomic(out / "rates.csv", res.to_csv())
    summary = {**meta, **res.summary()}
    write_atomic(out / "rates.json", json.dumps(summary, indent=2) + "\n")
    return {"files": [str(out / "rates.csv"), str(out / "rates.json")], **summary}


HANDLERS = {
    "path": cmd_path,
    "multipath": cmd_multipath,
    "simplex": cmd_simplex,
    "simulate": cmd_simulate,
    "rates": cmd_rates,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onestep", description="One-step estimation figures and studies.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="DIR", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--functional", metavar="NAME")
    return p


def run(argv=None) -> dict:
    args = build_parser().parse_args(argv)
    cfg = load_config(args.config).with_overrides(args.seed, args.out, args.functional)
    return HANDLERS[args.command](cfg)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    try:
        result = run(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (OneStepError, ValueError, FloatingPointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    for f in result["files"]:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
