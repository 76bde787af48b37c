"""Neumann modes, and the bounds that use a reference function f >= 1.

With f = 1 the reference-function bounds coincide with the plain ones; a
non-constant f trades a larger curvature term for a factor ||f||.
"""
import math

import numpy as np

from eigengrad import GeometryParams, ReferenceFunction, gradient_ratio, make_circle, make_interval
from eigengrad import neumann_lower_bound, neumann_upper_bound, solve
from eigengrad import bounds

g = GeometryParams(d=1)
for label, (spec, _), bc in [("circle", make_circle(2 * math.pi), "closed"),
                             ("interval", make_interval(math.pi), "neumann")]:
    print(label)
    for ep in solve(spec, bc, 4):
        print(f"   lambda {ep.lambda_:8.5f}: {neumann_lower_bound(g, ep.lambda_):.4f}"
              f" <= {gradient_ratio(ep):.4f} <= {neumann_upper_bound(0.0, ep.lambda_):.4f}")

x = np.linspace(0, 1, 2001)
one = ReferenceFunction.constant(x)
lin = ReferenceFunction.from_callable(x, lambda s: 1 + s)
print("\nK(f) for f = 1:", bounds.compute_K_f(one, 0.0), "  for f = 1 + x:", round(bounds.compute_K_f(lin, 0.0), 6))
for lam in (1.0, 10.0, 100.0):
    print(f"lambda={lam:>5}: f=1 lower {bounds.nonconvex_lower_bound(one, g, lam):.4f}"
          f"  f=1+x lower {bounds.nonconvex_lower_bound(lin, g, lam):.4f}"
          f"  upper {bounds.nonconvex_upper_bound(lin, 0.0, lam):.4f}")
