"""Hitting time of 0 for eps + b_t + alpha t: quadrature, closed form and Monte Carlo.

The survival 1 - P(T <= t) near eps = 0 is linear in eps, and its slope is the
function f(alpha) that bounds the boundary gradient of the survival function.
"""
import math

import numpy as np

from eigengrad import bounds, montecarlo as mc

print("P(T <= t) by quadrature against Monte Carlo (2e5 paths, bridge-corrected)")
for alpha, eps, t in [(0.0, 1.0, 1.0), (1.0, 0.5, 2.0), (-1.0, 0.5, 2.0)]:
    r = mc.simulate_fpt(alpha, eps, t, mc.MCConfig(200_000, dt=t / 100, seed=1))
    print(f"  alpha={alpha:+.1f} eps={eps} t={t}: exact {r.exact:.5f}  MC {r.estimate:.5f}"
          f" +- {r.stderr:.5f}  (z = {r.z_score:+.2f})")

# without the bridge correction, crossings between grid times are missed
raw = mc.simulate_fpt(0.0, 0.5, 1.0, mc.MCConfig(200_000, dt=0.01, seed=1, bridge_correction=False))
print(f"\nno bridge correction: MC {raw.estimate:.5f} vs exact {raw.exact:.5f} (z = {raw.z_score:+.1f})")

print("\nslope of the survival at eps -> 0 versus f(alpha), t = 1")
for alpha in np.linspace(-2, 2, 5):
    slope = mc.fpt_small_eps_slope(alpha, 1.0)
    print(f"  alpha={alpha:+.1f}: slope {slope:.6f}  f {bounds.psi_gradient_bound_f(alpha, 1.0):.6f}"
          f"  caps {bounds.psi_gradient_cap(alpha, 1.0):.4f}, {bounds.psi_gradient_cap_quadratic(alpha, 1.0):.4f}")
print("f(0, t=1) = sqrt(2/pi) =", math.sqrt(2 / math.pi))
