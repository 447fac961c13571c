"""Error rates along fixed directions: plug-in error shrinks like t, one-step bias like t^2."""
from onestep import ISD, direction_sweep
from onestep.presets import direction_catalog, grid_preset

P = grid_preset("beta22")
t = [0.01 * 2.0 ** -k for k in range(8)]
for name, Q in direction_catalog().items():
    if name == "beta22":
        continue
    r = direction_sweep(P, Q, ISD, t)
    print(f"{name:<8} plug-in slope {r.slope_plug_in:.3f}   one-step slope {r.slope_one_step:.6f}")

# at a uniform target the first-order term vanishes, and the sweep says so instead of fitting
r = direction_sweep(grid_preset("uniform"), grid_preset("linear"), ISD, t)
print("uniform target degenerate:", r.degenerate, "plug-in slope:", r.slope_plug_in)
