"""Finite-difference eigenpairs of L = Delta + grad V on the model domains.

The weighted form -(e^V u')' = lambda e^V u is discretised with a diagonal
mass matrix, symmetrised by M^{-1/2}, and the lowest modes are extracted from
the symmetric tridiagonal matrix by Sturm-sequence bisection (LAPACK stebz)
with inverse iteration for the vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .domains import DomainSpec


@dataclass
class EigenPair:
    lambda_: float
    grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    mass: np.ndarray
    norm_phi: float
    norm_grad: float
    norm_grad_boundary: float
    bc: str = "dirichlet"

    def __call__(self, x):
        return np.interp(x, self.grid, self.phi)


def _peak(values, i):
    """Quadratic-interpolated extremum of |values| near index i."""
    a = np.abs(values)
    if i == 0 or i == len(a) - 1:
        return float(a[i])
    y0, y1, y2 = a[i - 1], a[i], a[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom >= 0:
        return float(y1)
    return float(y1 - (y0 - y2) ** 2 / (8 * denom))


def sup_norm(values):
    values = np.asarray(values)
    return _peak(values, int(np.argmax(np.abs(values))))


def _derivative(u, h):
    # fourth-order central differences, fourth-order one-sided at the ends
    du = np.empty_like(u)
    du[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    c = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    du[0] = c @ u[:5]
    du[1] = np.array([-3, -10, 18, -6, 1]) / (12 * h) @ u[:5]
    du[-1] = -(c @ u[::-1][:5])
    du[-2] = -(np.array([-3, -10, 18, -6, 1]) / (12 * h) @ u[::-1][:5])
    return du


def _lowest(diag, off, lo, hi):
    if hi >= len(diag):
        raise ValueError(f"requested {hi + 1} modes from a {len(diag)}-node grid")
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(lo, hi),
                            lapack_driver="stebz")
    if not np.all(np.isfinite(w)) or not np.all(np.isfinite(v)):
        raise ArithmeticError("tridiagonal eigensolver did not converge")
    return w, v


def _normalise(u):
    i = int(np.argmax(np.abs(u)))
    return u * (math.copysign(1.0, u[i]) / sup_norm(u))


def _pair(lam, grid, u, mass, bc, boundary_idx, radial=False):
    h = grid[1] - grid[0]
    phi = _normalise(u)
    dphi = _derivative(phi, h)
    if bc == "neumann":
        dphi[0] = dphi[-1] = 0.0
    if radial:
        dphi[0] = 0.0
    nb = max((abs(dphi[j]) for j in boundary_idx), default=0.0)
    ng = max(sup_norm(dphi), nb)
    return EigenPair(float(lam), grid, phi, dphi, mass, 1.0, ng, nb, bc)


def _check_m(m, n):
    if m < 1:
        raise ValueError("need at least one mode")
    if m > n // 4:
        raise ValueError(f"m={m} too large for a grid of {n} nodes")


def solve_interval(spec: DomainSpec, bc="dirichlet", m=1):
    """Lowest m eigenpairs of -L on an interval; the Neumann list skips the
    constant mode."""
    if spec.kind != "interval":
        raise ValueError("solve_interval needs an interval domain")
    x = spec.grid
    h = x[1] - x[0]
    V = spec.V - np.max(spec.V)
    mu = np.exp(V)
    w = np.exp(0.5 * (V[1:] + V[:-1]))  # e^V at cell midpoints
    _check_m(m, len(x))
    if bc == "dirichlet":
        mass = mu[1:-1]
        diag = (w[:-1] + w[1:]) / (h * h * mass)
        off = -w[1:-1] / (h * h * np.sqrt(mass[:-1] * mass[1:]))
        lams, vecs = _lowest(diag, off, 0, m - 1)
        pairs = []
        for k in range(m):
            u = np.zeros_like(x)
            u[1:-1] = vecs[:, k] / np.sqrt(mass)
            pairs.append(_pair(lams[k], x, u, mu, bc, (0, len(x) - 1)))
        return pairs
    if bc == "neumann":
        mass = mu.copy()
        mass[0] *= 0.5
        mass[-1] *= 0.5
        stiff = np.zeros_like(x)
        stiff[:-1] += w
        stiff[1:] += w
        diag = stiff / (h * h * mass)
        off = -w / (h * h * np.sqrt(mass[:-1] * mass[1:]))
        lams, vecs = _lowest(diag, off, 0, m)
        pairs = []
        for k in range(1, m + 1):
            u = vecs[:, k] / np.sqrt(mass)
            pairs.append(_pair(lams[k], x, u, mass, bc, (0, len(x) - 1)))
        return pairs
    raise ValueError(f"unknown boundary condition {bc!r}")


def solve_ball_radial(spec: DomainSpec, m=1):
    """Radial Dirichlet modes of the ball: (r^{d-1} u')' = -lambda r^{d-1} u.

    Finite volumes with exact shell volumes; at r = 0 this reproduces the
    reflecting ghost-node stencil 2d (u_1 - u_0)/h^2.
    """
    if spec.kind != "ball":
        raise ValueError("solve_ball_radial needs a ball domain")
    r = spec.grid
    d = spec.dim
    h = r[1] - r[0]
    _check_m(m, len(r))
    rr = r[:-1]  # unknowns; u(R) = 0
    w = (r[:-1] + 0.5 * h) ** (d - 1)  # flux weights at r_{i+1/2}
    vol = ((rr + 0.5 * h) ** d - np.maximum(rr - 0.5 * h, 0.0) ** d) / d
    stiff = w.copy()
    stiff[1:] += w[:-1]
    diag = stiff / (h * vol)
    off = -w[:-1] / (h * np.sqrt(vol[:-1] * vol[1:]))
    lams, vecs = _lowest(diag, off, 0, m - 1)
    mass = np.append(vol, 0.0)
    pairs = []
    for k in range(m):
        u = np.zeros_like(r)
        u[:-1] = vecs[:, k] / np.sqrt(vol)
        pairs.append(_pair(lams[k], r, u, mass, "dirichlet", (len(r) - 1,), radial=True))
    return pairs


def circle_modes(spec: DomainSpec, m=1):
    """Exact sine modes of the circle sampled on its periodic grid."""
    if spec.kind != "circle":
        raise ValueError("circle_modes needs a circle domain")
    x = spec.grid
    pairs = []
    for k in range(1, m + 1):
        om = 2 * math.pi * k / spec.size
        phi, dphi = np.sin(om * x), om * np.cos(om * x)
        pairs.append(EigenPair(om * om, x, phi, dphi, np.ones_like(x), 1.0, om, 0.0, "closed"))
    return pairs


def solve(spec: DomainSpec, bc="dirichlet", m=1):
    if spec.kind == "interval":
        return solve_interval(spec, bc, m)
    if spec.kind == "ball":
        if bc != "dirichlet":
            raise ValueError("only Dirichlet modes are computed on the ball")
        return solve_ball_radial(spec, m)
    return circle_modes(spec, m)


def gradient_ratio(ep: EigenPair):
    return ep.norm_grad / ep.norm_phi


def boundary_gradient(ep: EigenPair, spec: DomainSpec):
    """max |N phi| over the boundary from second-order one-sided differences."""
    if not spec.has_boundary:
        raise ValueError("domain has no boundary")
    u = ep.phi
    h = ep.grid[1] - ep.grid[0]
    right = abs(3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    if spec.kind == "ball":
        return float(right)
    left = abs(-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    return float(max(left, right))
