"""First-passage laws and Monte-Carlo checks for the killed diffusion.

All simulated processes have generator L/2, i.e. dX = (1/2) grad V dt + dB,
so eigenfunction and survival-series comparisons decay like exp(-lambda t/2).
Paths are split into fixed-size chunks, each with its own Philox stream keyed
by (seed, chunk index), so results do not depend on how chunks are scheduled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .bounds import psi_gradient_bound_f
from .domains import CurvatureData, DomainSpec
from .eigensolver import EigenPair, solve

CHUNK = 1 << 16
DEFAULT_STEPS = 200


@dataclass(frozen=True)
class MCConfig:
    n_paths: int = 1_000_000
    dt: float | None = None
    seed: int = 0
    bridge_correction: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")

    def n_steps(self, t):
        """Number of Euler steps to horizon t; dt must not exceed t/100."""
        if self.dt is None:
            return DEFAULT_STEPS
        n = int(math.ceil(t / self.dt - 1e-9))
        if n < 100:
            raise ValueError(f"dt={self.dt} exceeds t/100 for horizon t={t}")
        return n


@dataclass
class FptResult:
    estimate: float
    stderr: float
    exact: float
    z_score: float
    n_paths: int = 0


@dataclass
class SurvivalResult:
    estimate: float
    stderr: float
    bound: float
    n_paths: int


@dataclass
class SlopeResult:
    estimate: float
    stderr: float
    bound: float
    eps: list = field(default_factory=list)
    values: list = field(default_factory=list)
    stderrs: list = field(default_factory=list)


@dataclass
class MartingaleReport:
    start_value: float
    checkpoints: list
    means: list
    stderrs: list
    z_scores: list
    threshold: float = 4.0

    @property
    def passed(self):
        return all(abs(z) <= self.threshold for z in self.z_scores)


def _z(estimate, exact, stderr):
    if stderr > 0:
        return (estimate - exact) / stderr
    return 0.0 if estimate == exact else math.inf


def _rng(seed, *key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _chunk_sizes(n):
    full, rest = divmod(n, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _run_chunks(cfg: MCConfig, work, *key):
    """Run ``work(rng, size)`` over all chunks; results come back in chunk order."""
    sizes = _chunk_sizes(cfg.n_paths)
    jobs = [(_rng(cfg.seed, *key, i), s) for i, s in enumerate(sizes)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(lambda j: work(*j), jobs))
    return [work(*j) for j in jobs]


# --------------------------------------------------------------------------
# drifted Brownian motion started at eps, absorbed at 0

def fpt_density(s, alpha, eps):
    """Sub-probability density of the hitting time of 0 by eps + b_s + alpha s."""
    s = np.asarray(s, dtype=float)
    return eps * np.exp(-(eps + alpha * s) ** 2 / (2 * s)) / np.sqrt(2 * np.pi * s**3)


def fpt_probability_exact(alpha, eps, t):
    """P(T <= t) for T the hitting time of 0 by eps + b_s + alpha s.

    With r = 2s/eps^2 and then w = r^{-1/2} the integral becomes
    (2/sqrt(pi)) e^{-alpha eps} int_{eps/sqrt(2t)}^inf exp(-w^2 - alpha^2 eps^2/(4 w^2)) dw,
    which has no singular point.
    """
    if not eps > 0 or not t > 0:
        raise ValueError(f"eps and t must be positive (eps={eps}, t={t})")
    a = alpha * alpha * eps * eps / 4
    lo = eps / math.sqrt(2 * t)

    def g(w):
        return math.exp(-w * w - a / (w * w))

    if lo < 1:
        head, _ = integrate.quad(g, lo, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
        tail, _ = integrate.quad(g, 1.0, math.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
        val = head + tail
    else:
        val, _ = integrate.quad(g, lo, math.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    p = 2 / math.sqrt(math.pi) * math.exp(-alpha * eps) * val
    return min(max(p, 0.0), 1.0)


def fpt_probability_quad_s(alpha, eps, t):
    """Same probability integrated directly in the time variable."""
    val, _ = integrate.quad(lambda s: fpt_density(s, alpha, eps), 0.0, t,
                            epsabs=1e-13, epsrel=1e-12, limit=400)
    return val


def half_line_integral():
    """int_0^inf r^{-3/2} e^{-1/r} dr, which equals sqrt(pi)."""
    a, _ = integrate.quad(lambda r: r**-1.5 * math.exp(-1.0 / r), 0.0, 1.0,
                          epsabs=1e-14, epsrel=1e-14)
    # r > 1 with v = 1/r: int_0^1 v^{-1/2} e^{-v} dv, algebraic weight at 0
    b, _ = integrate.quad(lambda v: math.exp(-v), 0.0, 1.0, weight="alg", wvar=(-0.5, 0.0),
                          epsabs=1e-14, epsrel=1e-14)
    return a + b


def _fpt_chunk(alpha, eps, t, steps, bridge):
    dt = t / steps
    sq = math.sqrt(dt)

    def work(rng, size):
        y = np.full(size, float(eps))
        hits = 0
        for _ in range(steps):
            y_new = y + alpha * dt + sq * rng.standard_normal(y.size)
            hit = y_new <= 0
            if bridge:
                p = np.exp(-2 * np.maximum(y, 0) * np.maximum(y_new, 0) / dt)
                hit |= rng.random(y.size) < p
            hits += int(np.count_nonzero(hit))
            y = y_new[~hit]
            if y.size == 0:
                break
        return hits

    return work


def simulate_fpt(alpha, eps, t, cfg: MCConfig = MCConfig(), key=()):
    """Monte-Carlo estimate of P(T <= t) with the binomial standard error."""
    if not eps > 0 or not t > 0:
        raise ValueError("eps and t must be positive")
    steps = cfg.n_steps(t)
    hits = sum(_run_chunks(cfg, _fpt_chunk(alpha, eps, t, steps, cfg.bridge_correction),
                           1, *key))
    n = cfg.n_paths
    p = hits / n
    se = math.sqrt(p * (1 - p) / n)
    exact = fpt_probability_exact(alpha, eps, t)
    return FptResult(p, se, exact, _z(p, exact, se), n)


def _linear_intercept(x, y, var=None):
    """Least-squares intercept of y = a + b x, and its variance."""
    X = np.column_stack([np.ones(len(x)), np.asarray(x, dtype=float)])
    coef = np.linalg.pinv(X)[0]
    a = float(coef @ np.asarray(y, dtype=float))
    v = float(coef**2 @ np.asarray(var, dtype=float)) if var is not None else 0.0
    return a, v


def fpt_small_eps_slope(alpha, t, eps_list=None):
    """Extrapolate (1 - P(T <= t))/eps to eps -> 0 from the three smallest eps."""
    if eps_list is None:
        eps_list = np.geomspace(1e-2, 1e-4, 7)
    eps = np.sort(np.asarray(eps_list, dtype=float))
    if eps.size < 3:
        raise ValueError("need at least three eps values")
    if eps[-1] / eps[0] < 10:
        raise ValueError("eps values must span at least a decade")
    e3 = eps[:3]
    s = [(1 - fpt_probability_exact(alpha, e, t)) / e for e in e3]
    return _linear_intercept(e3, s)[0]


def fpt_small_eps_slope_mc(alpha, t, eps_list=(0.02, 0.04, 0.08), cfg=MCConfig()):
    """Monte-Carlo version of the slope extrapolation; returns a SlopeResult."""
    eps = np.asarray(eps_list, dtype=float)
    vals, var = [], []
    for i, e in enumerate(eps):
        r = simulate_fpt(alpha, e, t, cfg, key=(i,))
        vals.append((1 - r.estimate) / e)
        var.append((r.stderr / e) ** 2)
    a, v = _linear_intercept(eps, vals, var)
    return SlopeResult(a, math.sqrt(v), psi_gradient_bound_f(alpha, t), list(eps), vals,
                       [math.sqrt(x) for x in var])


# --------------------------------------------------------------------------
# killed diffusion on a model domain

def _start(spec, x, size):
    if spec.kind == "interval":
        if not 0 < x < spec.size:
            raise ValueError(f"start point {x} not interior to (0, {spec.size})")
        return np.full(size, float(x))
    if spec.kind == "ball":
        if not 0 <= x < spec.size:
            raise ValueError(f"start radius {x} not interior to the ball")
        X = np.zeros((size, spec.dim))
        X[:, 0] = x
        return X
    raise ValueError("the circle has no boundary; nothing is killed")


def _step(spec, X, dt, rng, bridge):
    """One Euler step; returns (new positions, killed mask)."""
    sq = math.sqrt(dt)
    if spec.kind == "interval":
        L = spec.size
        Xn = X + sq * rng.standard_normal(X.size)
        if spec.has_drift:
            Xn += 0.5 * spec.drift(X) * dt
        dead = (Xn <= 0) | (Xn >= L)
        if bridge:
            p0 = np.exp(-2 * np.maximum(X, 0) * np.maximum(Xn, 0) / dt)
            pL = np.exp(-2 * np.maximum(L - X, 0) * np.maximum(L - Xn, 0) / dt)
            dead |= rng.random(X.size) < p0 + pL - p0 * pL
        return Xn, dead
    R = spec.size
    Xn = X + sq * rng.standard_normal(X.shape)
    rn = np.sqrt(np.einsum("ij,ij->i", Xn, Xn))
    dead = rn >= R
    if bridge:
        r0 = np.sqrt(np.einsum("ij,ij->i", X, X))
        # tangent-plane approximation of the sphere
        p = np.exp(-2 * np.maximum(R - r0, 0) * np.maximum(R - rn, 0) / dt)
        dead |= rng.random(X.shape[0]) < p
    return Xn, dead


def _coord(spec, X):
    return X if spec.kind == "interval" else np.sqrt(np.einsum("ij,ij->i", X, X))


def simulate_killed_diffusion(spec: DomainSpec, x, t, cfg: MCConfig = MCConfig(),
                              curvature: CurvatureData | None = None, key=()):
    """Survival frequency estimating psi(t, x) = P(tau_D > t).

    ``bound`` is P(t < T) for the drifted Brownian motion started at the
    boundary distance of x with drift ``curvature.alpha`` (nan without it).
    """
    if not t > 0:
        raise ValueError("t must be positive")
    steps = cfg.n_steps(t)
    dt = t / steps
    bridge = cfg.bridge_correction

    def work(rng, size):
        X = _start(spec, x, size)
        for _ in range(steps):
            X, dead = _step(spec, X, dt, rng, bridge)
            X = X[~dead]
            if X.shape[0] == 0:
                break
        return X.shape[0]

    alive = sum(_run_chunks(cfg, work, 2, *key))
    n = cfg.n_paths
    p = alive / n
    se = math.sqrt(p * (1 - p) / n)
    bound = math.nan
    if curvature is not None:
        eps = float(spec.boundary_distance(x))
        bound = 1 - fpt_probability_exact(curvature.alpha, eps, t)
    return SurvivalResult(p, se, bound, n)


def martingale_check(ep: EigenPair, spec: DomainSpec, x, t_checkpoints,
                     cfg: MCConfig = MCConfig(), threshold=4.0):
    """Estimate E[phi(X_{t^tau}) exp(lambda (t^tau)/2)] at each checkpoint.

    phi vanishes on the boundary, so the stopped value is
    phi(X_t) exp(lambda t/2) on survivors and 0 otherwise.
    """
    if ep.bc != "dirichlet":
        raise ValueError("martingale check needs a Dirichlet eigenpair")
    checkpoints = sorted(float(c) for c in t_checkpoints)
    start = float(ep(x))
    horizon = checkpoints[-1]
    if horizon <= 0:
        return MartingaleReport(start, checkpoints, [start] * len(checkpoints),
                                [0.0] * len(checkpoints), [0.0] * len(checkpoints), threshold)
    steps = cfg.n_steps(horizon)
    dt = horizon / steps
    marks = {}
    for j, c in enumerate(checkpoints):
        marks.setdefault(int(round(c / dt)), []).append(j)
    bridge = cfg.bridge_correction
    lam = ep.lambda_

    def work(rng, size):
        s1 = np.zeros(len(checkpoints))
        s2 = np.zeros(len(checkpoints))
        X = _start(spec, x, size)
        for j in marks.get(0, []):
            s1[j] += size * start
            s2[j] += size * start * start
        for k in range(1, steps + 1):
            if X.shape[0]:
                X, dead = _step(spec, X, dt, rng, bridge)
                X = X[~dead]
            for j in marks.get(k, []):
                v = ep(_coord(spec, X)) * math.exp(lam * k * dt / 2)
                s1[j] += v.sum()
                s2[j] += (v * v).sum()
        return s1, s2

    parts = _run_chunks(cfg, work, 3)
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    n = cfg.n_paths
    means = s1 / n
    var = np.maximum(s2 / n - means**2, 0.0)
    se = np.sqrt(var / n)
    z = [float(_z(m, start, s)) for m, s in zip(means, se)]
    return MartingaleReport(start, checkpoints, means.tolist(), se.tolist(), z, threshold)


def _default_ladder(spec):
    return tuple(spec.size * f for f in (0.01, 0.02, 0.03, 0.04))


def boundary_gradient_psi(spec: DomainSpec, curvature: CurvatureData, t,
                          cfg: MCConfig = MCConfig(), eps_ladder=None):
    """Extrapolate psi(t, x_eps)/eps to eps -> 0 at a boundary point.

    On the interval both end points are sampled when a drift is present, and
    the larger extrapolated gradient is returned.
    """
    if not spec.has_boundary:
        raise ValueError("domain has no boundary")
    ladder = np.asarray(eps_ladder if eps_ladder is not None else _default_ladder(spec))
    bound = psi_gradient_bound_f(curvature.alpha, t)
    if spec.kind == "ball":
        sides = [lambda e: spec.size - e]
    elif spec.has_drift:
        sides = [lambda e: e, lambda e: spec.size - e]
    else:
        sides = [lambda e: e]
    best = None
    for si, side in enumerate(sides):
        vals, var = [], []
        for i, e in enumerate(ladder):
            r = simulate_killed_diffusion(spec, side(e), t, cfg, key=(si, i))
            vals.append(r.estimate / e)
            var.append((r.stderr / e) ** 2)
        a, v = _linear_intercept(ladder, vals, var)
        res = SlopeResult(a, math.sqrt(v), bound, list(ladder), vals, [math.sqrt(x) for x in var])
        if best is None or res.estimate > best.estimate:
            best = res
    return best


# --------------------------------------------------------------------------
# spectral oracles

def _survival_modes(spec, modes):
    pairs = solve(spec, "dirichlet", modes)
    coefs = []
    for ep in pairs:
        w = ep.mass
        coefs.append(float(w @ ep.phi) / float(w @ (ep.phi * ep.phi)))
    return pairs, coefs


def survival_series(spec: DomainSpec, x, t, modes=64):
    """psi(t, x) = sum_k c_k exp(-lambda_k t/2) phi_k(x) from the eigensolver."""
    pairs, coefs = _survival_modes(spec, modes)
    x = np.asarray(x, dtype=float)
    return sum(c * math.exp(-ep.lambda_ * t / 2) * ep(x) for ep, c in zip(pairs, coefs))


def survival_boundary_gradient_series(spec: DomainSpec, t, modes=64):
    """|d psi/dn| at the (right for the ball, left for the interval) boundary."""
    pairs, coefs = _survival_modes(spec, modes)
    idx = -1 if spec.kind == "ball" else 0
    return abs(sum(c * math.exp(-ep.lambda_ * t / 2) * ep.dphi[idx]
                   for ep, c in zip(pairs, coefs)))


def with_seed(cfg: MCConfig, seed):
    return replace(cfg, seed=seed)
