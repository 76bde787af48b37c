"""The unit disc: a convex domain where the boundary term alpha is negative.

Half the Laplacian of the boundary distance R - r is -(d-1)/(2r) <= -(d-1)/(2R),
so alpha = -1/2 for the unit disc and only the alpha <= 0 variants apply.  The
first radial mode is J_0(j_{0,1} r).
"""
import numpy as np
from scipy import special

from eigengrad import GeometryParams, dirichlet_lower_bound, dirichlet_upper_bound
from eigengrad import boundary_gradient, gradient_ratio, make_ball, solve
from eigengrad.bounds import admissible_variants

spec, curv = make_ball(2, 1.0)
print("alpha =", curv.alpha)
j01 = special.jn_zeros(0, 1)[0]

ep = solve(spec, "dirichlet", 1)[0]
r = np.linspace(0, 1, 20001)
print(f"lambda_1   solver {ep.lambda_:.8f}   Bessel {j01**2:.8f}")
print(f"ratio      solver {gradient_ratio(ep):.8f}   Bessel {j01 * np.max(special.j1(j01 * r)):.8f}")
print(f"|d phi/dn| solver {boundary_gradient(ep, spec):.8f}   Bessel {j01 * special.j1(j01):.8f}")

g = GeometryParams(d=2, alpha=curv.alpha)
print("\nlower bound", round(dirichlet_lower_bound(g, ep.lambda_), 6))
for v in admissible_variants(g.alpha):
    bs = dirichlet_upper_bound(g, ep.lambda_, v)
    print(f"  {v:>10}: {bs.upper:.6f}  ({bs.branch})")

# higher radial modes: the sandwich keeps holding while the upper bound stays O(sqrt(lambda))
for k, e in enumerate(solve(spec, "dirichlet", 6), start=1):
    up = min(dirichlet_upper_bound(g, e.lambda_, v).upper for v in admissible_variants(g.alpha))
    print(f"k={k}  ratio/sqrt(lam) = {gradient_ratio(e) / np.sqrt(e.lambda_):.4f}"
          f"   upper/sqrt(lam) = {up / np.sqrt(e.lambda_):.4f}")
