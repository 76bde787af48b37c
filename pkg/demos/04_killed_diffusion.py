"""Killed diffusion with generator L/2 on the interval and on the disc.

phi(X_{t ^ tau}) exp(lambda (t ^ tau)/2) is a martingale for a Dirichlet
eigenfunction, and the survival probability near the boundary grows no faster
than f(alpha) times the distance.
"""
import math

from eigengrad import make_ball, make_interval, montecarlo as mc, solve

cfg = mc.MCConfig(200_000, dt=0.005, seed=4)
for name, (spec, curv), x in [("interval", make_interval(math.pi), 1.0),
                              ("disc", make_ball(2, 1.0), 0.3)]:
    ep = solve(spec, "dirichlet", 1)[0]
    rep = mc.martingale_check(ep, spec, x, [0.1, 0.25, 0.5], cfg)
    print(f"{name}: phi(x) = {rep.start_value:.5f}")
    for t, m, s in zip(rep.checkpoints, rep.means, rep.stderrs):
        print(f"   t={t:<5} mean {m:.5f} +- {s:.5f}")

spec, curv = make_interval(math.pi)
surv = mc.simulate_killed_diffusion(spec, math.pi / 2, 1.0, cfg, curv)
print(f"\npsi(1, pi/2): MC {surv.estimate:.5f}, spectral series "
      f"{float(mc.survival_series(spec, math.pi / 2, 1.0)):.5f}, one-sided bound {surv.bound:.5f}")

slope = mc.boundary_gradient_psi(spec, curv, 1.0, cfg)
print(f"|grad psi| at the boundary: MC {slope.estimate:.4f} +- {slope.stderr:.4f}, "
      f"series {mc.survival_boundary_gradient_series(spec, 1.0):.4f}, bound f(0) = {slope.bound:.4f}")
