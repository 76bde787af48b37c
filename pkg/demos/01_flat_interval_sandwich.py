"""Gradient ratio of Dirichlet modes on [0, pi] between the two closed-form bounds.

On the flat interval phi_k = sin(kx), so ||phi_k'|| / ||phi_k|| = k = sqrt(lambda_k)
exactly.  The lower bound is 1/sqrt(e) sqrt(lambda) and every admissible upper
variant collapses to the same constant times sqrt(lambda).
"""
import math

from eigengrad import GeometryParams, best_dirichlet_bounds, dirichlet_lower_bound
from eigengrad import gradient_ratio, make_interval, solve

spec, curv = make_interval(math.pi)
g = GeometryParams(d=1, K=0.0, K_V=curv.K_V, alpha=curv.alpha)
print(f"alpha = {curv.alpha}, K_V = {curv.K_V}")

print(f"{'k':>2} {'lambda':>10} {'lower':>9} {'ratio':>9} {'upper':>9}  variant")
for k, ep in enumerate(solve(spec, "dirichlet", 6), start=1):
    lo = dirichlet_lower_bound(g, ep.lambda_)
    up = best_dirichlet_bounds(g, ep.lambda_)
    print(f"{k:>2} {ep.lambda_:>10.6f} {lo:>9.5f} {gradient_ratio(ep):>9.5f} {up.upper:>9.5f}  {up.variant}")

# the bounds divided by sqrt(lambda) are constants here
print("lower / sqrt(lambda) =", dirichlet_lower_bound(g, 1.0))
print("upper / sqrt(lambda) =", best_dirichlet_bounds(g, 1.0).upper)
