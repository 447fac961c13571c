"""Acceptance criteria, one test per criterion, each under its own time budget.

Every criterion records a ``PASS`` or ``FAIL`` line that is printed in the
terminal summary; ``python tests/test_acceptance.py`` prints the same lines
without pytest.
"""
import contextlib
import io
import sys
import time
from pathlib import Path as FsPath

import numpy as np
import pytest

sys.path.insert(0, str(FsPath(__file__).parent))

from battery import P3, PT3, direction_battery, random_grid_pairs, random_pmf_pairs  # noqa: E402
from onestep.cli import main  # noqa: E402
from onestep.dist import DiscreteDist, SampleSet, l2_distance, mix, sample  # noqa: E402
from onestep.estimators import KdeConfig, one_step, replicate, split_folds, split_one_step  # noqa: E402
from onestep.functionals import ISD, MEAN, gateaux_fd, influence_derivative  # noqa: E402
from onestep.io import read_csv_columns  # noqa: E402
from onestep.paths import (  # noqa: E402
    Path,
    exact_r2,
    one_step_intercept,
    pathwise_derivative_at_one,
    quadratic_fit,
    v_curve,
)
from onestep.presets import grid_preset  # noqa: E402
from onestep.rates import direction_sweep  # noqa: E402
from onestep.scorepath import score_identity_check  # noqa: E402

RESULTS = []

# first seeded run of the Monte Carlo study, frozen
MC_SEED = 20261016
MC_FROZEN = {
    "plug_in": (-0.005377006045630628, 0.946),
    "plug_in_split": (-0.008279041952516941, 0.934),
    "one_step": (-0.004234807088667969, 0.946),
    "one_step_crossfit": (-0.0039318970876756065, 0.928),
}

CONTINUOUS_PAIRS = [
    ("beta22", "uniform"),
    ("beta22", "linear"),
    ("beta22", "twobump"),
    ("linear", "uniform"),
    ("twobump", "linear"),
]


def exact_r2_identity():
    for P, Pt in random_pmf_pairs(20, seed=101):
        r2 = one_step_intercept(Path(P, Pt), ISD) - ISD(P)
        assert abs(r2 + np.sum((Pt.masses - P.masses) ** 2)) < 1e-12
    for a, b in CONTINUOUS_PAIRS:
        P, Pt = grid_preset(a), grid_preset(b)
        assert abs(exact_r2(Path(P, Pt), ISD) + l2_distance(P, Pt) ** 2) < 1e-8


def hand_values():
    path = Path(DiscreteDist(P3), DiscreteDist(PT3))
    assert abs(pathwise_derivative_at_one(path, ISD) - 0.1) < 1e-12
    assert abs(one_step_intercept(path, ISD) - 0.36) < 1e-12
    assert abs(exact_r2(path, ISD) + 0.02) < 1e-12
    path = Path(grid_preset("beta22"), grid_preset("linear"))
    assert abs(ISD(path.target) - 1.2) < 1e-6
    assert abs(ISD(path.initial) - 4 / 3) < 1e-6
    assert abs(pathwise_derivative_at_one(path, ISD) - 2 / 3) < 1e-6
    assert abs(one_step_intercept(path, ISD) - 2 / 3) < 1e-6
    assert abs(exact_r2(path, ISD) + 8 / 15) < 1e-6


def distance_scaling():
    pairs = random_pmf_pairs(10, seed=103) + random_grid_pairs(10, seed=104, m=4096)
    for P, Pt in pairs:
        D = l2_distance(P, Pt)
        for eps in np.linspace(0, 1, 21):
            assert abs(l2_distance(P, mix(P, Pt, eps)) - eps * D) < 1e-10


def gateaux_agreement():
    pairs = random_pmf_pairs(20, seed=105) + random_grid_pairs(10, seed=106, m=4096)
    for T in (ISD, MEAN):
        for G, Q in pairs:
            assert abs(gateaux_fd(T, G, Q, 1e-4) - influence_derivative(T, G, Q)) < 1e-6
    # second-order convergence toward a point mass, on a functional with a cubic v-curve
    from battery import CUBIC

    G = DiscreteDist(P3)
    Q = DiscreteDist.point_mass(G.atoms, 0)
    target = float(CUBIC.influence_on_support(G)[0])
    err = [abs(gateaux_fd(CUBIC, G, Q, h) - target) for h in (1e-2, 1e-3, 1e-4)]
    assert abs(err[0] / err[1] / 100 - 1) < 0.01
    assert abs(err[1] / err[2] / 100 - 1) < 0.01


def score_equivalence():
    pairs = random_pmf_pairs(20, seed=107) + random_grid_pairs(10, seed=108, m=4096)
    for T in (ISD, MEAN):
        for G, Q in pairs:
            c = score_identity_check(T, G, Q)
            assert c.residual < 1e-6
            assert abs(c.rhs - influence_derivative(T, G, Q)) < 1e-10


def quadratic_recovery():
    pairs = [(P, Q) for P, Q, _ in direction_battery(grid_preset("beta22"))]
    pairs += [(grid_preset(a), grid_preset(b)) for a, b in CONTINUOUS_PAIRS]
    for P, Q in pairs:
        assert quadratic_fit(v_curve(Path(P, Q), ISD)).max_residual < 1e-10
        assert abs(quadratic_fit(v_curve(Path(P, Q), MEAN)).c2) < 1e-10


def rate_slopes():
    t = tuple(0.01 * 2.0 ** -k for k in range(8))
    for P, Q, name in direction_battery(grid_preset("beta22")):
        r = direction_sweep(P, Q, ISD, t)
        assert not r.degenerate, name
        assert abs(r.slope_one_step - 2.0) < 1e-6, name
        assert 0.9 <= r.slope_plug_in <= 1.1, name
    r = direction_sweep(grid_preset("uniform"), grid_preset("linear"), ISD, t)
    assert r.degenerate and r.slope_plug_in is None


def monte_carlo():
    study = replicate(ISD, grid_preset("beta22"), 2000, 500, KdeConfig(rule="undersmoothed"), seed=MC_SEED)
    assert 0.92 <= study.coverage("one_step") <= 0.98
    assert abs(study.bias("one_step")) < abs(study.bias("plug_in"))
    assert abs(study.bias("one_step")) < abs(study.bias("plug_in_split"))
    for name, (bias, cover) in MC_FROZEN.items():
        assert study.bias(name) == pytest.approx(bias, rel=1e-9, abs=1e-15), name
        assert study.coverage(name) == cover, name


def linear_exactness():
    P = grid_preset("beta22")
    s = sample(P, 501, 17)
    _, ev = split_folds(s.n, 3)
    fold = SampleSet(s.points[ev])
    assert split_one_step(MEAN, s, split_seed=3).estimate == np.mean(fold.points)
    for name in ("uniform", "linear", "twobump", "beta22"):
        Q = grid_preset(name)
        assert one_step(MEAN, Q, fold).estimate == np.mean(fold.points)
        assert abs(exact_r2(Path(P, Q), MEAN)) < 1e-10
    for P, Q in random_pmf_pairs(10, seed=109):
        assert abs(exact_r2(Path(P, Q), MEAN)) < 1e-10


def figure_reproduction(out):
    configs = {
        "path": "[run]\ntarget = beta22\ninitial = linear\n",
        "multipath": "[run]\ntarget = beta22\ninitial = uniform; linear; twobump\n",
        "simplex": "[run]\ntarget = pmf(0.5,0.3,0.2)\ninitial = pmf(0.6,0.3,0.1)\n[simplex]\nresolution = 301\n",
    }
    for cmd, text in configs.items():
        cfg = out / f"{cmd}.ini"
        cfg.write_text(text)
        with contextlib.redirect_stdout(io.StringIO()):
            assert main([cmd, "--config", str(cfg), "--out", str(out)]) == 0

    d = read_csv_columns(out / "fig1_densities.csv")
    for e in (0.25, 0.5, 0.75):
        assert np.max(np.abs(d[f"p_eps_{e:g}"] - ((1 - e) * d["p_eps_0"] + e * d["p_eps_1"]))) < 1e-9
    dz = d["z"][1] - d["z"][0]
    vc = read_csv_columns(out / "fig1_vcurve.csv")
    for e, v in zip(vc["eps"], vc["value"]):
        assert abs(np.sum(((1 - e) * d["p_eps_0"] + e * d["p_eps_1"]) ** 2) * dz - v) < 1e-9
    D = np.sqrt(np.sum((d["p_eps_0"] - d["p_eps_1"]) ** 2) * dz)
    assert np.max(np.abs(vc["delta"] - vc["eps"] * D)) < 1e-9

    c = read_csv_columns(out / "fig2_curves.csv")
    for k in np.unique(c["path_id"]):
        rows = c["path_id"] == k
        tan = c["value"][rows][-1] + (c["eps"][rows] - 1) * (c["value"][rows][-1] - c["intercept"][rows][0])
        assert np.max(np.abs(c["tangent"][rows] - tan)) < 1e-9
        frac = c["distance_from_P"][rows] / c["distance_from_P"][rows][-1]
        assert np.max(np.abs(frac - c["eps"][rows])) < 1e-9

    s = read_csv_columns(out / "fig3_surface.csv")
    q3 = 1 - s["q1"] - s["q2"]
    assert np.max(np.abs(s["T"] - (s["q1"] ** 2 + s["q2"] ** 2 + q3 ** 2))) < 1e-9
    i = np.argmin(s["T"])
    assert abs(s["T"][i] - 1 / 3) < 1e-12
    assert abs(s["q1"][i] - 1 / 3) < 1e-12 and abs(s["q2"][i] - 1 / 3) < 1e-12
    for vertex in ((s["q1"] == 1) & (s["q2"] == 0), (s["q1"] == 0) & (s["q2"] == 1), (s["q1"] == 0) & (s["q2"] == 0)):
        assert abs(s["T"][vertex][0] - 1.0) < 1e-12
    p = read_csv_columns(out / "fig3_paths.csv")
    q3 = 1 - p["q1"] - p["q2"]
    assert np.max(np.abs(p["T"] - (p["q1"] ** 2 + p["q2"] ** 2 + q3 ** 2))) < 1e-9


CRITERIA = [
    (1, "exact remainder identity", exact_r2_identity, 5),
    (2, "hand-checkable values", hand_values, 1),
    (3, "distance scaling", distance_scaling, 2),
    (4, "Gateaux agreement", gateaux_agreement, 5),
    (5, "score-based equivalence", score_equivalence, 5),
    (6, "quadratic recovery", quadratic_recovery, 2),
    (7, "rate slopes", rate_slopes, 10),
    (8, "Monte Carlo study", monte_carlo, 300),
    (9, "linear-functional exactness", linear_exactness, 1),
    (10, "figure reproduction", figure_reproduction, 10),
]


def check(number, name, fn, budget, *args):
    start = time.perf_counter()
    error = None
    try:
        fn(*args)
    except Exception as exc:
        error = exc
    elapsed = time.perf_counter() - start
    ok = error is None and elapsed < budget
    why = "" if ok else f" ({error!r})" if error else f" (over budget of {budget} s)"
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {name} [{elapsed:.2f} s]{why}"
    RESULTS.append(line)
    print(line)
    return ok, line


@pytest.mark.parametrize("number,name,fn,budget", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, fn, budget, tmp_path):
    args = (tmp_path,) if fn is figure_reproduction else ()
    ok, line = check(number, name, fn, budget, *args)
    assert ok, line


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        results = [check(*c, *((FsPath(tmp),) if c[2] is figure_reproduction else ())) for c in CRITERIA]
    sys.exit(0 if all(ok for ok, _ in results) else 1)
