"""Model domains with exact curvature data and, where known, exact spectra.

Three kinds are supported: an interval [0, L] carrying a drift potential V
(operator L = d^2/dx^2 + V' d/dx), the Euclidean ball of radius R in
dimension d (radial problem), and the circle of length L (no boundary).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize, special

DEFAULT_NODES = 4096


@dataclass(frozen=True, eq=False)
class DomainSpec:
    kind: str
    size: float
    dim: int
    grid: np.ndarray
    V: Optional[np.ndarray] = None
    dV: Optional[np.ndarray] = None
    d2V: Optional[np.ndarray] = None
    eigenvalues: dict = field(default_factory=dict)
    label: str = ""

    @property
    def has_boundary(self):
        return self.kind != "circle"

    @property
    def has_drift(self):
        return self.dV is not None and bool(np.any(self.dV != 0))

    def boundary_distance(self, x):
        """Distance to the boundary (ball: ``x`` is the radius)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "interval":
            return np.minimum(x, self.size - x)
        if self.kind == "ball":
            return self.size - x
        raise ValueError("circle has no boundary")

    def drift(self, x):
        """V'(x) by linear interpolation of the stored samples."""
        if self.dV is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return np.interp(x, self.grid, self.dV)


@dataclass(frozen=True)
class CurvatureData:
    K0: float
    K_V: float
    theta: float
    delta: float
    alpha: float
    alpha_global: float
    cut_locus: tuple


def _sample(fn, x, name):
    vals = np.asarray(fn(x), dtype=float) * np.ones_like(x)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"non-finite samples of {name}")
    return vals


def _second_difference(u, h):
    d2 = np.empty_like(u)
    d2[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
    d2[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / h**2
    d2[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / h**2
    return d2


def make_interval(L, V: Callable | None = None, dV: Callable | None = None,
                  d2V: Callable | None = None, nodes=DEFAULT_NODES):
    """Interval [0, L] with drift potential V.

    V and its derivatives are sampled once on the grid; missing derivatives
    are taken by finite differences.  Returns ``(spec, curvature)``.
    """
    if not L > 0:
        raise ValueError("interval length must be positive")
    x = np.linspace(0.0, L, nodes + 2)
    if V is None and dV is None:
        Vs = dVs = d2Vs = np.zeros_like(x)
    else:
        Vs = _sample(V, x, "V") if V is not None else None
        if dV is not None:
            dVs = _sample(dV, x, "V'")
        else:
            dVs = np.gradient(Vs, x, edge_order=2)
        if Vs is None:
            # potential recovered from V' by the trapezoid rule
            Vs = np.concatenate([[0.0], np.cumsum(0.5 * (dVs[1:] + dVs[:-1]) * np.diff(x))])
        if d2V is not None:
            d2Vs = _sample(d2V, x, "V''")
        elif V is not None:
            d2Vs = _second_difference(Vs, x[1] - x[0])
        else:
            d2Vs = np.gradient(dVs, x, edge_order=2)

    # Ric^V = -V'' in one dimension; Ric^V >= -K_V
    K_V = float(np.max(d2Vs))
    # (1/2) L rho with rho = min(x, L-x): rho'' = 0 off x = L/2, rho' = +-1;
    # one-sided limits at the cut point are included in the sup
    left = x <= L / 2
    right = x >= L / 2
    dV_mid = float(np.interp(L / 2, x, dVs))
    alpha = 0.5 * max(np.max(dVs[left]), dV_mid, np.max(-dVs[right]), -dV_mid)
    alpha_global = 0.5 * float(np.max(np.abs(dVs)))

    eig = {}
    if not np.any(dVs):
        k = np.arange(1, 65)
        eig = {"dirichlet": (k * math.pi / L) ** 2, "neumann": (k * math.pi / L) ** 2}
    spec = DomainSpec("interval", float(L), 1, x, Vs, dVs, d2Vs, eig,
                      label=f"interval(L={L:g})")
    curv = CurvatureData(0.0, K_V, 0.0, 0.0, float(alpha), alpha_global, (L / 2,))
    return spec, curv


def bessel_zeros(nu, m):
    """First m positive zeros of J_nu (real order) by bracketing and Brent."""
    if float(nu).is_integer() and nu >= 0:
        return special.jn_zeros(int(nu), m)
    zeros = []
    step = 0.1
    a = 1e-6
    fa = special.jv(nu, a)
    while len(zeros) < m:
        b = a + step
        fb = special.jv(nu, b)
        if fa * fb < 0:
            zeros.append(optimize.brentq(lambda z: special.jv(nu, z), a, b, xtol=1e-15))
        a, fa = b, fb
    return np.array(zeros)


def make_ball(d, R, nodes=DEFAULT_NODES):
    """Ball of radius R in R^d; the grid is the radius r in [0, R]."""
    if d < 2:
        raise ValueError("ball dimension must be >= 2 (use make_interval for d = 1)")
    if not R > 0:
        raise ValueError("radius must be positive")
    r = np.linspace(0.0, R, nodes + 2)
    h = r[1] - r[0]
    # (1/2) Laplacian of R - r is -(d-1)/(2r); the centre cell is excluded
    off_cut = r > h
    alpha = float(np.max(-(d - 1) / (2 * r[off_cut])))
    nu = d / 2 - 1
    eig = {"dirichlet": (bessel_zeros(nu, 32) / R) ** 2}
    spec = DomainSpec("ball", float(R), int(d), r, eigenvalues=eig, label=f"ball(d={d}, R={R:g})")
    curv = CurvatureData(0.0, 0.0, 0.0, 0.0, alpha, 0.0, (0.0,))
    return spec, curv


def make_circle(L, nodes=DEFAULT_NODES):
    """Circle of length L; periodic grid on [0, L)."""
    if not L > 0:
        raise ValueError("circle length must be positive")
    x = np.linspace(0.0, L, nodes, endpoint=False)
    k = np.arange(1, 65)
    lam = (2 * math.pi * k / L) ** 2
    spec = DomainSpec("circle", float(L), 1, x, eigenvalues={"closed": lam},
                      label=f"circle(L={L:g})")
    curv = CurvatureData(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, ())
    return spec, curv


def cd_constant(spec: DomainSpec, n):
    """Smallest K with CD(-K, n) for L = Delta + grad V on a model domain.

    In one dimension CD(-K, n) with n > 1 reads V'' + V'^2/(n-1) <= K; for
    n = 1 it needs V' = 0.
    """
    if spec.kind == "interval" and spec.has_drift:
        if n <= spec.dim:
            raise ValueError("a drift requires effective dimension n > d")
        return float(np.max(spec.d2V + spec.dV**2 / (n - spec.dim)))
    if n < spec.dim:
        raise ValueError("n must be >= d")
    return 0.0
