"""Walk the mixture path between a Beta(2,2) target and a linear initial guess.

The one-step value is where the tangent to v(eps) = T(P_eps) at eps = 1 meets
eps = 0.  For the integrated squared density v is a parabola, so the gap
between that intercept and T(P) is exactly -||P - Ptilde||^2.
"""
import numpy as np

from onestep import ISD, Path, exact_r2, one_step_intercept, pathwise_derivative_at_one, tangent, v_curve
from onestep.presets import grid_preset

P, Pt = grid_preset("beta22"), grid_preset("linear")
path = Path(P, Pt)
curve = v_curve(path, ISD, 11)

print(f"T(P)       = {ISD(P):.6f}")
print(f"T(Ptilde)  = {ISD(Pt):.6f}")
print(f"v'(1)      = {pathwise_derivative_at_one(path, ISD):.6f}")
print(f"intercept  = {one_step_intercept(path, ISD):.6f}")
print(f"remainder  = {exact_r2(path, ISD):.6f}   -||P - Ptilde||^2 = {-path.distance ** 2:.6f}")
print()
print("  eps   delta      v(eps)   tangent")
for e, d, v, t in zip(curve.eps, curve.deltas, curve.values, tangent(path, ISD, curve.eps)):
    print(f"{e:5.1f} {d:7.4f} {v:11.6f} {t:9.6f}")

# halving the distance quarters the remainder
for w in (1.0, 0.5, 0.25):
    sub = Path(P, path.at(w))
    print(f"distance {sub.distance:.4f}  remainder {exact_r2(sub, ISD):.6f}")
np.testing.assert_allclose(exact_r2(path, ISD), -path.distance ** 2, atol=1e-8)
