"""Closed-form two-sided gradient bounds for Dirichlet and Neumann eigenfunctions.

Every function returns bounds on the ratio ``||grad phi||_inf / ||phi||_inf``
unless its name or docstring says "squared".  Curvature constants follow the
"lower bound is -K" sign convention: a stored ``K`` means ``Ric >= -K``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

# |K|/lambda below this switches (lambda/(lambda+K))^(lambda/K) to its series.
LIMIT_CUTOFF = 1e-8

SQRT_E = math.sqrt(math.e)

DIRICHLET_VARIANTS = ("A", "A'", "A*", "hat-A", "A*-simple", "A-simple")
_NONNEG_ALPHA = {"A", "A'", "A-simple"}
_NONPOS_ALPHA = {"A*", "hat-A", "A*-simple"}


@dataclass(frozen=True)
class GeometryParams:
    """Scalar curvature and boundary data entering the bounds.

    ``K`` is the curvature-dimension constant (CD(-K, n)), ``K_V`` the
    Bakry-Emery Ricci constant and ``alpha`` an upper bound for half the
    generator applied to the boundary distance.
    """

    d: int = 1
    n: float | None = None
    K: float = 0.0
    K_V: float | None = None
    theta: float = 0.0
    delta: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension d must be >= 1")
        if self.n is None:
            object.__setattr__(self, "n", float(self.d))
        if self.n < self.d:
            raise ValueError(f"effective dimension n={self.n} below d={self.d}")
        if self.K_V is None:
            object.__setattr__(self, "K_V", float(self.K))

    @classmethod
    def from_ricci_mean_curvature(cls, d, K0, theta, **kw):
        """Build parameters with alpha = max(theta, sqrt((d-1) K0)) / 2."""
        if K0 < 0 or theta < 0:
            raise ValueError("K0 and theta must be nonnegative for this alpha")
        return cls(d=d, K=K0, theta=theta, alpha=alpha_from_curvature(d, K0, theta), **kw)


def alpha_from_curvature(d, K0, theta, grad_V_sup=0.0):
    """alpha = (max(theta, sqrt((d-1) K0)) + ||grad V||_inf) / 2."""
    return 0.5 * (max(theta, math.sqrt((d - 1) * max(K0, 0.0))) + grad_V_sup)


@dataclass
class BoundSet:
    lower: float
    upper: float
    variant: str
    branch: str
    sign: str
    intermediates: dict = field(default_factory=dict)

    def contains(self, ratio, rtol=0.0):
        return self.lower * (1 - rtol) <= ratio <= self.upper * (1 + rtol)


@dataclass
class ReferenceFunction:
    """A reference function f >= 1 sampled on a grid, with the log-derivatives
    needed for c_eps(f) and K(f)."""

    grid: np.ndarray
    samples: np.ndarray
    log_grad_sq: np.ndarray
    L_log_f: np.ndarray
    sup_norm: float

    @classmethod
    def constant(cls, grid):
        grid = np.asarray(grid, dtype=float)
        ones = np.ones_like(grid)
        return cls(grid, ones, np.zeros_like(grid), np.zeros_like(grid), 1.0)

    @classmethod
    def from_callable(cls, grid, f, df=None, d2f=None, dV=None):
        """Sample f on a 1-D grid.  Missing derivatives are taken by
        second-order finite differences; ``dV`` adds the drift part of L."""
        grid = np.asarray(grid, dtype=float)
        fx = np.asarray(f(grid), dtype=float)
        if df is not None:
            fp = np.asarray(df(grid), dtype=float)
        else:
            fp = np.gradient(fx, grid, edge_order=2)
        if d2f is not None:
            fpp = np.asarray(d2f(grid), dtype=float)
        else:
            fpp = np.gradient(fp, grid, edge_order=2)
        if np.any(fx <= 0) or not np.all(np.isfinite(fx)):
            raise ValueError("reference function must be positive and finite")
        if abs(fx.min() - 1.0) > 1e-9:
            raise ValueError(f"reference function must have inf f = 1, got {fx.min()}")
        dlog = fp / fx
        d2log = fpp / fx - dlog**2
        L = d2log
        if dV is not None:
            L = L + np.asarray(dV(grid), dtype=float) * dlog
        return cls(grid, fx, dlog**2, L, float(fx.max()))


def _check_lambda(lam):
    if not lam > 0:
        raise ValueError(f"eigenvalue must be positive, got {lam}")


def _log_convention_power(lam, K):
    # log of (lam/(lam+K))^(lam/K) = -(lam/K) log1p(K/lam)
    x = K / lam
    if x <= -1.0:
        if x == -1.0:
            return -math.inf
        raise ValueError(f"lambda + K must be nonnegative (lambda={lam}, K={K})")
    if abs(x) < LIMIT_CUTOFF:
        return -(1.0 - x / 2.0 + x * x / 3.0)
    return -math.log1p(x) / x


def convention_power(lambda_, K):
    """(lambda/(lambda+K))^(lambda/K), equal to 1/e in the limit K -> 0.

    Negative K is admitted as long as lambda + K >= 0.
    """
    _check_lambda(lambda_)
    return math.exp(_log_convention_power(lambda_, K))


def _sharp_lower_sq(lam, c, n):
    # lam^2/(n(lam+c)) * (lam/(lam+c))^(lam/c); the lam + c -> 0 limit is lam/n
    if lam + c < 0:
        raise ValueError(f"lambda + c = {lam + c} < 0")
    if lam + c == 0:
        return lam / n
    return lam * lam / (n * (lam + c)) * convention_power(lam, c)


def dirichlet_lower_bound(g: GeometryParams, lambda_):
    """Lower bound on the gradient ratio under CD(-K, n), using K+ = max(K, 0)."""
    _check_lambda(lambda_)
    return math.sqrt(_sharp_lower_sq(lambda_, max(g.K, 0.0), g.n))


def dirichlet_lower_bound_weak(g: GeometryParams, lambda_):
    _check_lambda(lambda_)
    return lambda_ / math.sqrt(g.n * math.e * (lambda_ + max(g.K, 0.0)))


def _lower_objective(t, lam, K, n):
    # lam^2 (e^{Kt}-1) / (n K e^{(lam+K)+ t}), arranged so nothing overflows
    if abs(K) * t < LIMIT_CUTOFF or abs(K) / lam < LIMIT_CUTOFF:
        return lam * lam * t * (1.0 + 0.5 * K * t) / n * math.exp(-max(lam + K, 0.0) * t)
    if K > 0:
        return lam * lam * (-math.expm1(-K * t) / K) / n * math.exp(-lam * t)
    return lam * lam * (math.expm1(K * t) / K) / n * math.exp(-max(lam + K, 0.0) * t)


def dirichlet_lower_bound_sup_t(g: GeometryParams, lambda_, t_grid=None):
    """Numerical supremum over t of the squared lower bound.

    Returns ``(value, t_star)``; ``value`` bounds the *squared* ratio.  The grid
    maximum is refined by golden-section search on the neighbouring bracket.
    """
    _check_lambda(lambda_)
    K, n = g.K, g.n
    if t_grid is None:
        t_grid = np.geomspace(1e-4, 1e3, 2001) / lambda_
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    if t_grid.size == 0:
        raise ValueError("empty t grid")
    if np.any(t_grid <= 0):
        raise ValueError("t grid must be positive")
    vals = np.array([_lower_objective(t, lambda_, K, n) for t in t_grid])
    i = int(np.argmax(vals))
    if t_grid.size < 3:
        return float(vals[i]), float(t_grid[i])
    lo = t_grid[max(i - 1, 0)]
    hi = t_grid[min(i + 1, t_grid.size - 1)]
    a, b = lo, hi
    invphi = (math.sqrt(5) - 1) / 2
    c, d_ = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = _lower_objective(c, lambda_, K, n), _lower_objective(d_, lambda_, K, n)
    while b - a > 1e-13 * max(b, 1.0):
        if fc > fd:
            b, d_, fd = d_, c, fc
            c = b - invphi * (b - a)
            fc = _lower_objective(c, lambda_, K, n)
        else:
            a, c, fc = c, d_, fd
            d_ = a + invphi * (b - a)
            fd = _lower_objective(d_, lambda_, K, n)
    if max(fc, fd) < vals[i]:
        return float(vals[i]), float(t_grid[i])
    return (float(fc), float(c)) if fc > fd else (float(fd), float(d_))


def optimal_time(lambda_, K):
    """Maximiser t* = log(1 + K/lambda)/K of the lower-bound objective (1/lambda at K=0)."""
    _check_lambda(lambda_)
    if abs(K) / lambda_ < LIMIT_CUTOFF:
        return 1.0 / lambda_
    return math.log1p(K / lambda_) / K


def eps_max_branch(A, B):
    """max over eps in [0,1] of eps*A + sqrt(1-eps)*B, and the branch label."""
    if A < 0 or B < 0:
        raise ValueError(f"A and B must be nonnegative (A={A}, B={B})")
    if A == 0:
        return float(B), "large-eigenvalue"
    if B > 2 * A:
        return float(B), "large-eigenvalue"
    value = A + B * B / (4 * A)
    return float(value), ("boundary" if B == 2 * A else "eps-interior")


def eps_max_closed_form(A, B):
    return eps_max_branch(A, B)[0]


def _scaled_lambda(g, lam):
    s = lam + g.K_V
    if s < 0:
        raise ValueError(
            f"lambda + K_V = {s} < 0: curvature constant K_V={g.K_V} is inconsistent "
            f"with eigenvalue {lam}"
        )
    return lam + max(g.K_V, 0.0)


def _check_variant(variant, alpha):
    if variant not in DIRICHLET_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {DIRICHLET_VARIANTS}")
    if variant in _NONNEG_ALPHA and alpha < 0:
        raise ValueError(f"variant {variant} requires alpha >= 0, got {alpha}")
    if variant in _NONPOS_ALPHA and alpha > 0:
        raise ValueError(f"variant {variant} requires alpha <= 0, got {alpha}")


def admissible_variants(alpha):
    if alpha > 0:
        return [v for v in DIRICHLET_VARIANTS if v not in _NONPOS_ALPHA]
    if alpha < 0:
        return [v for v in DIRICHLET_VARIANTS if v not in _NONNEG_ALPHA]
    return list(DIRICHLET_VARIANTS)


def dirichlet_upper_bound(g: GeometryParams, lambda_, variant="A") -> BoundSet:
    """Upper bound on the Dirichlet gradient ratio for one printed variant.

    ``lambda + K_V < 0`` raises; the formulas use K_V+ as in the derivation.
    """
    _check_lambda(lambda_)
    alpha = g.alpha
    _check_variant(variant, alpha)
    s = _scaled_lambda(g, lambda_)
    B = math.sqrt(s)
    gauss = math.sqrt(2 * s / math.pi) * math.exp(-alpha**2 / (2 * s))
    inter = {"B": B}
    sign = "alpha>=0" if alpha >= 0 else "alpha<=0"

    if variant == "A":
        A = alpha + gauss + min(abs(alpha), math.sqrt(2) * alpha**2 / math.sqrt(math.pi * s))
        inter["A"] = A
        value, branch = eps_max_branch(A, B)
        upper = SQRT_E * value
    elif variant == "A'":
        A = 2 * alpha + gauss
        inter["A'"] = A
        value, branch = eps_max_branch(A, B)
        upper = SQRT_E * value
    elif variant == "A*":
        A = gauss
        inter["A*"] = A
        value, branch = eps_max_branch(A, B)
        upper = SQRT_E * value
    elif variant == "hat-A":
        Ahat = (alpha + math.sqrt(2 * lambda_ / math.pi) * math.exp(-alpha**2 / (2 * lambda_))
                + min(abs(alpha), math.sqrt(2) * alpha**2 / math.sqrt(math.pi * lambda_)))
        inter["hat-A"] = Ahat
        # max over eps of eps*e*Ahat + sqrt(1-eps)*sqrt(e)*B; a negative Ahat is
        # dominated by eps = 0
        upper, branch = eps_max_branch(math.e * max(Ahat, 0.0), SQRT_E * B)
    elif variant == "A*-simple":
        upper = B * (math.sqrt(2 / math.pi) + 0.25 * math.sqrt(math.pi / 2)) * SQRT_E
        branch = "eps-interior"
    else:  # A-simple
        a2 = 2 * alpha + math.sqrt(2 * s)
        upper = SQRT_E * (a2 / math.sqrt(math.pi) + s / 4 * math.sqrt(math.pi) / a2)
        inter["A"] = a2 / math.sqrt(math.pi)
        branch = "eps-interior"
    return BoundSet(
        lower=dirichlet_lower_bound(g, lambda_),
        upper=float(upper),
        variant=variant,
        branch=branch,
        sign=sign,
        intermediates=inter,
    )


def dirichlet_upper_bounds(g: GeometryParams, lambda_):
    """All admissible variants for the sign of alpha, keyed by name."""
    return {v: dirichlet_upper_bound(g, lambda_, v) for v in admissible_variants(g.alpha)}


def best_dirichlet_bounds(g: GeometryParams, lambda_) -> BoundSet:
    allb = dirichlet_upper_bounds(g, lambda_)
    return min(allb.values(), key=lambda b: b.upper)


def intro_c1_c2(g: GeometryParams, lambda1):
    """Domain constants (c1, c2) with c1 sqrt(lam) <= ratio <= c2 sqrt(lam),
    evaluated from the first Dirichlet eigenvalue ``lambda1``; ``g.alpha`` plays
    the role of alpha_0."""
    _check_lambda(lambda1)
    K = g.K
    if lambda1 + K <= 0:
        raise ValueError("lambda1 + K must be positive")
    c1 = math.sqrt(lambda1) / math.sqrt(g.d * math.e * (lambda1 + K))
    B = math.sqrt(lambda1 + K)
    A = 2 * max(g.alpha, 0.0) + math.sqrt(2 * (lambda1 + K) / math.pi)
    if B > 2 * A:
        c2 = math.sqrt(math.e * (lambda1 + K)) / math.sqrt(lambda1)
    else:
        c2 = SQRT_E / math.sqrt(lambda1) * (A + (lambda1 + K) / (4 * A))
    return c1, c2


def psi_gradient_bound_f(alpha, t):
    """Boundary-gradient bound for the survival function at time t.

    f(alpha) = sqrt(2/(pi t)) exp(-alpha^2 t/2) + alpha
               + |alpha| sqrt(2t/pi) int_0^|alpha| exp(-s^2 t/2) ds
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    a = abs(alpha)
    head = math.sqrt(2 / (math.pi * t)) * math.exp(-alpha * alpha * t / 2) + alpha
    # int_0^a exp(-s^2 t/2) ds = sqrt(pi/(2t)) erf(a sqrt(t/2))
    return head + a * special.erf(a * math.sqrt(t / 2))


def psi_gradient_cap(alpha, t):
    """First simplified cap: alpha + sqrt(2/(pi t)) e^{-alpha^2 t/2} + min(|alpha|, alpha^2 sqrt(2t/pi))."""
    return (alpha + math.sqrt(2 / (math.pi * t)) * math.exp(-alpha * alpha * t / 2)
            + min(abs(alpha), alpha * alpha * math.sqrt(2 * t / math.pi)))


def psi_gradient_cap_quadratic(alpha, t):
    """Second cap: sqrt(2/(pi t)) + alpha + sqrt(t/(2 pi)) alpha^2."""
    return math.sqrt(2 / (math.pi * t)) + alpha + math.sqrt(t / (2 * math.pi)) * alpha * alpha


def eigenfunction_boundary_bound(lambda_, alpha, t_grid=None):
    """inf over t of e^{lambda t/2} f(alpha, t): bounds the boundary gradient
    of a sup-normalised Dirichlet eigenfunction.  Returns (value, t)."""
    _check_lambda(lambda_)
    if t_grid is None:
        t_grid = np.geomspace(1e-3, 1e2, 400) / lambda_
    vals = [math.exp(lambda_ * t / 2) * psi_gradient_bound_f(alpha, t) for t in t_grid]
    i = int(np.argmin(vals))
    return float(vals[i]), float(t_grid[i])


def neumann_upper_bound(K_or_Kf, lambda_):
    """sqrt( 2(lambda+K)/pi * (1+K/lambda)^(lambda/K) ); multiply by ||f||_inf
    when K is K(f) of a reference function."""
    _check_lambda(lambda_)
    K = K_or_Kf
    if lambda_ + K < 0:
        raise ValueError(f"lambda + K = {lambda_ + K} < 0: inconsistent inputs")
    if lambda_ + K == 0:
        return math.sqrt(2 * lambda_ / math.pi)
    return math.sqrt(2 * (lambda_ + K) / math.pi / convention_power(lambda_, K))


def neumann_upper_bound_weak(K, lambda_):
    _check_lambda(lambda_)
    if lambda_ + K < 0:
        raise ValueError(f"lambda + K = {lambda_ + K} < 0: inconsistent inputs")
    return math.sqrt(2 * math.e * (lambda_ + max(K, 0.0)) / math.pi)


def neumann_lower_bound(g: GeometryParams, lambda_):
    """Neumann / closed-manifold lower bound; K may be negative if lambda + K >= 0."""
    _check_lambda(lambda_)
    return math.sqrt(_sharp_lower_sq(lambda_, g.K, g.n))


def neumann_lower_bound_weak(g: GeometryParams, lambda_):
    _check_lambda(lambda_)
    return lambda_ / math.sqrt(g.n * math.e * (lambda_ + max(g.K, 0.0)))


def compute_c_eps_f(rf: ReferenceFunction, eps, K, K_V=None, mode="weighted"):
    """Grid supremum defining c_eps(f).

    ``mode="weighted"`` mixes curvature as eps*K + (1-eps)*K_V and uses L log f;
    ``mode="unweighted"`` uses K alone (V = 0, so L log f is the Laplacian).
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if mode == "weighted":
        if K_V is None:
            K_V = K
        curv = eps * K + (1 - eps) * K_V
    elif mode == "unweighted":
        curv = K
    else:
        raise ValueError(f"unknown mode {mode!r}")
    expr = 4 * eps * rf.log_grad_sq / (1 - eps) + curv - 2 * rf.L_log_f
    return float(np.max(expr))


def compute_K_f(rf: ReferenceFunction, K_V):
    return float(np.max(2 * rf.log_grad_sq + K_V - rf.L_log_f))


def _nonconvex_lower_sq(rf, g, lam, eps, mode):
    c = compute_c_eps_f(rf, eps, g.K, g.K_V, mode)
    if lam + c < 0:
        raise ValueError(f"lambda + c_eps(f) = {lam + c} < 0 at eps={eps}")
    return eps * _sharp_lower_sq(lam, c, g.n)


def nonconvex_lower_bound(rf: ReferenceFunction, g: GeometryParams, lambda_, eps_grid=None,
                          mode="weighted"):
    """Non-convex Neumann lower bound: sup over eps of the eps-weighted sharp
    bound with c_eps(f), divided by ||f||_inf.

    An explicit ``eps_grid`` is used as given.  With the default, 999 grid
    points are refined by golden-section search and the one-sided limit
    eps -> 1 is included when grad log f vanishes identically.
    """
    _check_lambda(lambda_)
    explicit = eps_grid is not None
    if eps_grid is None:
        eps_grid = np.linspace(0.001, 0.999, 999)
    eps_grid = np.asarray(list(eps_grid), dtype=float)
    if eps_grid.size == 0:
        raise ValueError("empty eps grid")
    vals = np.array([_nonconvex_lower_sq(rf, g, lambda_, e, mode) for e in eps_grid])
    best = float(vals.max())
    if not explicit:
        i = int(np.argmax(vals))
        lo = eps_grid[max(i - 1, 0)]
        hi = eps_grid[min(i + 1, eps_grid.size - 1)]
        if hi > lo:
            res = optimize.minimize_scalar(
                lambda e: -_nonconvex_lower_sq(rf, g, lambda_, e, mode),
                bounds=(lo, hi), method="bounded", options={"xatol": 1e-12},
            )
            best = max(best, float(-res.fun))
        if np.max(rf.log_grad_sq) == 0.0:
            # eps -> 1: the gradient term is absent, curvature term tends to K
            c1 = float(np.max(g.K - 2 * rf.L_log_f))
            if lambda_ + c1 >= 0:
                best = max(best, _sharp_lower_sq(lambda_, c1, g.n))
    return math.sqrt(best) / rf.sup_norm


def nonconvex_lower_bound_weak(rf, g, lambda_, eps_grid=None, mode="weighted"):
    if eps_grid is None:
        eps_grid = np.linspace(0.001, 0.999, 999)
    best = 0.0
    for e in eps_grid:
        c = compute_c_eps_f(rf, e, g.K, g.K_V, mode)
        best = max(best, e * lambda_**2 / (g.n * math.e * (lambda_ + max(c, 0.0))))
    return math.sqrt(best) / rf.sup_norm


def nonconvex_upper_bound(rf: ReferenceFunction, K_V, lambda_):
    """Non-convex Neumann upper bound ||f||_inf * neumann_upper_bound(K(f), lambda)."""
    return rf.sup_norm * neumann_upper_bound(compute_K_f(rf, K_V), lambda_)
