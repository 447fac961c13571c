"""A small Monte Carlo run: plug-in against one-step for the integrated squared density.

Use the ``simulate`` command with ``configs/simulate.ini`` for the full-size study.
"""
from onestep import ISD, KdeConfig, efficiency_bound, replicate
from onestep.presets import grid_preset

P = grid_preset("beta22", 2048)
n, reps = 1000, 100
study = replicate(ISD, P, n, reps, KdeConfig(rule="undersmoothed"), seed=2026)
bound = efficiency_bound(ISD, P, n)

print(f"truth {study.truth:.4f}, n={n}, reps={reps}, efficiency bound {bound:.3g}")
print(f"{'estimator':<18}{'bias':>10}{'mse/bound':>11}{'coverage':>10}")
for row in study.summary():
    print(f"{row['estimator']:<18}{row['mean_bias']:10.5f}{row['mse'] / bound:11.2f}{row['coverage']:10.3f}")
