"""Closed-form bounds checked against independent evaluations."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from eigengrad import bounds as b
from eigengrad.bounds import GeometryParams, ReferenceFunction

E = math.e


def grid_eps_max(A, B, n=1_000_001):
    # uniform in u = sqrt(1 - eps), where the objective is the quadratic A(1-u^2) + B u
    u = np.linspace(0.0, 1.0, n)
    return float(np.max(A * (1 - u * u) + B * u))


# -- convention power -----------------------------------------------------

def test_convention_power_examples():
    assert b.convention_power(1.0, 0.0) == pytest.approx(1 / E, abs=1e-15)
    assert b.convention_power(1.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    ref = math.exp(-2.0 * math.log1p(1e-9 / 2.0) / 1e-9)
    assert abs(b.convention_power(2.0, 1e-9) - ref) < 1e-8
    assert abs(b.convention_power(2.0, 1e-9) - 1 / E) < 1e-8


@given(st.floats(0.05, 50), st.floats(0.5, 2.0))
def test_convention_power_continuous_at_cutoff(lam, scale):
    K = lam * b.LIMIT_CUTOFF * scale
    direct = math.exp(-lam * math.log1p(K / lam) / K)
    assert b.convention_power(lam, K) == pytest.approx(direct, rel=1e-12)


def test_convention_power_rejects_lambda_plus_k_negative():
    with pytest.raises(ValueError):
        b.convention_power(1.0, -1.5)


# -- Dirichlet lower bound ------------------------------------------------

def test_lower_bound_examples():
    assert b.dirichlet_lower_bound(GeometryParams(d=1), 1.0) == pytest.approx(0.60653066, abs=1e-8)
    g = GeometryParams(d=2, n=2, K=1.0)
    assert b.dirichlet_lower_bound(g, 1.0) == pytest.approx(math.sqrt(0.125), abs=1e-14)
    g = GeometryParams(d=2, K=0.0)
    lam = 5.78319
    assert b.dirichlet_lower_bound(g, lam) == pytest.approx(math.sqrt(lam / (2 * E)), abs=1e-12)
    assert b.dirichlet_lower_bound(g, lam) == pytest.approx(1.031386, abs=1e-6)


def test_weak_lower_bound_is_weaker():
    for K in (0.0, 0.5, 3.0):
        for lam in (0.3, 1.0, 20.0):
            g = GeometryParams(d=1, n=2, K=K)
            assert b.dirichlet_lower_bound_weak(g, lam) <= b.dirichlet_lower_bound(g, lam) + 1e-15


def test_sup_t_examples():
    v, t = b.dirichlet_lower_bound_sup_t(GeometryParams(d=1), 1.0)
    assert v == pytest.approx(1 / E, abs=1e-10) and t == pytest.approx(1.0, rel=1e-5)
    v, t = b.dirichlet_lower_bound_sup_t(GeometryParams(d=2, n=2, K=1.0), 1.0)
    assert v == pytest.approx(0.125, abs=1e-10) and t == pytest.approx(math.log(2), rel=1e-5)
    g = GeometryParams(d=1, n=1, K=2.0)
    v, _ = b.dirichlet_lower_bound_sup_t(g, 3.0)
    assert abs(math.sqrt(v) - b.dirichlet_lower_bound(g, 3.0)) < 1e-8


def test_sup_t_against_scipy_bounded_search():
    # independent maximiser of the unsimplified objective
    lam, K, n = 2.5, 0.7, 3.0
    obj = lambda t: -lam**2 * (math.exp(K * t) - 1) / (n * K * math.exp((lam + K) * t))
    res = optimize.minimize_scalar(obj, bounds=(1e-6, 10), method="bounded",
                                   options={"xatol": 1e-12})
    v, t = b.dirichlet_lower_bound_sup_t(GeometryParams(d=1, n=n, K=K), lam)
    assert v == pytest.approx(-res.fun, rel=1e-10)
    assert t == pytest.approx(b.optimal_time(lam, K), rel=1e-5)


# -- eps-max --------------------------------------------------------------

def test_eps_max_examples():
    assert b.eps_max_closed_form(0.0, 3.0) == 3.0
    assert b.eps_max_closed_form(1.0, 1.0) == pytest.approx(1.25, abs=1e-15)
    assert abs(grid_eps_max(1.0, 1.0) - 1.25) < 1e-9
    assert b.eps_max_closed_form(1.0, 2.0) == pytest.approx(2.0, abs=1e-15)
    assert b.eps_max_branch(1.0, 2.0)[1] == "boundary"
    assert b.eps_max_branch(1.0, 3.0)[1] == "large-eigenvalue"
    assert b.eps_max_branch(1.0, 1.0)[1] == "eps-interior"


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 10.0), st.floats(0.0, 10.0))
def test_eps_max_matches_grid(A, B):
    assert abs(b.eps_max_closed_form(A, B) - grid_eps_max(A, B, 200_001)) < 1e-8 * max(1, A + B)


def test_eps_max_rejects_negative():
    with pytest.raises(ValueError):
        b.eps_max_closed_form(-1.0, 1.0)


# -- Dirichlet upper bounds -----------------------------------------------

def test_upper_flat_value():
    ref = math.sqrt(2 * E / math.pi) + math.sqrt(math.pi * E) / (4 * math.sqrt(2))
    for v in ("A", "A'", "A*", "A*-simple", "A-simple"):
        bs = b.dirichlet_upper_bound(GeometryParams(d=1), 1.0, v)
        assert bs.upper == pytest.approx(ref, abs=1e-12), v
    assert ref == pytest.approx(1.8320807, abs=1e-7)


def test_upper_branch_arithmetic():
    bs = b.dirichlet_upper_bound(GeometryParams(d=1, K_V=3.0), 1.0, "A'")
    Ap = math.sqrt(8 / math.pi)
    assert bs.intermediates["A'"] == pytest.approx(Ap, abs=1e-14)
    assert bs.intermediates["B"] == pytest.approx(2.0, abs=1e-14)
    assert bs.branch == "eps-interior"
    assert bs.upper == pytest.approx(math.sqrt(E) * grid_eps_max(Ap, 2.0), abs=1e-9)
    assert bs.upper == pytest.approx(3.66416, abs=1e-5)


def test_upper_alpha_negative_ball():
    lam, alpha = 5.78319, -0.5
    bs = b.dirichlet_upper_bound(GeometryParams(d=2, alpha=alpha), lam, "A*")
    Astar = math.sqrt(2 * lam / math.pi) * math.exp(-alpha**2 / (2 * lam))
    assert bs.intermediates["A*"] == pytest.approx(Astar, abs=1e-13)
    assert Astar == pytest.approx(1.87775, abs=1e-5)
    assert bs.upper == pytest.approx(math.sqrt(E) * grid_eps_max(Astar, math.sqrt(lam)), abs=1e-9)
    assert bs.upper == pytest.approx(4.36533, abs=1e-5)


def test_hat_a_eps_max_by_grid():
    lam, alpha = 5.78319, -0.5
    bs = b.dirichlet_upper_bound(GeometryParams(d=2, alpha=alpha), lam, "hat-A")
    Ahat = bs.intermediates["hat-A"]
    ref = grid_eps_max(E * Ahat, math.sqrt(E * lam))
    assert bs.upper == pytest.approx(ref, abs=1e-9)


def test_variant_sign_restrictions():
    with pytest.raises(ValueError):
        b.dirichlet_upper_bound(GeometryParams(alpha=-0.1), 1.0, "A")
    with pytest.raises(ValueError):
        b.dirichlet_upper_bound(GeometryParams(alpha=0.1), 1.0, "A*")
    with pytest.raises(ValueError):
        b.dirichlet_upper_bound(GeometryParams(), 1.0, "Z")
    assert set(b.admissible_variants(0.0)) == set(b.DIRICHLET_VARIANTS)
    assert "A*" not in b.admissible_variants(1.0)
    assert "A" not in b.admissible_variants(-1.0)


def test_upper_rejects_understated_kv():
    with pytest.raises(ValueError, match="K_V"):
        b.dirichlet_upper_bound(GeometryParams(K_V=-10.0), 1.0)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.0, 5.0), st.floats(0.0, 3.0))
def test_upper_above_lower(lam, K, alpha):
    g = GeometryParams(d=1, n=1, K=K, K_V=K, alpha=alpha)
    best = b.best_dirichlet_bounds(g, lam)
    assert best.upper >= b.dirichlet_lower_bound(g, lam)
    # monotone in alpha for the A variant
    g2 = GeometryParams(d=1, n=1, K=K, K_V=K, alpha=alpha + 0.5)
    assert b.dirichlet_upper_bound(g2, lam).upper >= b.dirichlet_upper_bound(g, lam).upper


def test_intro_constants():
    c1, c2 = b.intro_c1_c2(GeometryParams(d=1), 1.0)
    assert c1 == pytest.approx(1 / math.sqrt(E), abs=1e-14)
    assert c2 == pytest.approx(1.8320807, abs=1e-7)
    c1, _ = b.intro_c1_c2(GeometryParams(d=2), 5.78319)
    assert c1 == pytest.approx(1 / math.sqrt(2 * E), abs=1e-14)
    assert c1 == pytest.approx(0.42888, abs=1e-5)
    g = GeometryParams(d=1, K=1.0, alpha=1.0)
    A = 2 + math.sqrt(4 / math.pi)
    assert A == pytest.approx(3.12838, abs=1e-5)
    _, c2 = b.intro_c1_c2(g, 1.0)
    assert c2 == pytest.approx(math.sqrt(E) * (A + 2 / (4 * A)), abs=1e-13)


def test_from_ricci_mean_curvature():
    g = GeometryParams.from_ricci_mean_curvature(3, 1.0, 0.5)
    assert g.alpha == pytest.approx(0.5 * math.sqrt(2))
    assert b.alpha_from_curvature(2, 0.0, 0.4, grad_V_sup=0.2) == pytest.approx(0.3)


# -- boundary-gradient function f(alpha, t) -------------------------------

def f_quad(alpha, t):
    integral, _ = integrate.quad(lambda s: math.exp(-s * s * t / 2), 0, abs(alpha),
                                 epsabs=1e-15, epsrel=1e-13)
    return (math.sqrt(2 / (math.pi * t)) * math.exp(-alpha**2 * t / 2) + alpha
            + abs(alpha) * math.sqrt(2 * t / math.pi) * integral)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 10))
def test_f_matches_quadrature(alpha, t):
    assert b.psi_gradient_bound_f(alpha, t) == pytest.approx(f_quad(alpha, t), rel=1e-12, abs=1e-13)


def test_f_examples():
    assert b.psi_gradient_bound_f(0.0, 1.0) == pytest.approx(math.sqrt(2 / math.pi), abs=1e-15)
    f1 = b.psi_gradient_bound_f(1.0, 1.0)
    assert 1.79788 <= f1 <= 2.19682
    assert b.psi_gradient_bound_f(-2.0, 1.0) == pytest.approx(b.psi_gradient_bound_f(2.0, 1.0) - 4,
                                                             abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 10))
def test_f_caps_and_evenness(alpha, t):
    f = b.psi_gradient_bound_f(alpha, t)
    assert f <= b.psi_gradient_cap(alpha, t) + 1e-12
    assert f <= b.psi_gradient_cap_quadratic(alpha, t) + 1e-12
    assert f - alpha == pytest.approx(b.psi_gradient_bound_f(-alpha, t) + alpha, abs=1e-12)


def test_f_second_derivative():
    h = 1e-4
    for alpha in (-1.5, -0.2, 0.0, 0.7, 2.0):
        for t in (0.5, 1.0, 3.0):
            f = lambda a: b.psi_gradient_bound_f(a, t)
            d2 = (f(alpha + h) - 2 * f(alpha) + f(alpha - h)) / h**2
            assert abs(d2 - math.sqrt(2 * t / math.pi) * math.exp(-alpha**2 * t / 2)) < 1e-6


def test_eigenfunction_boundary_bound_flat():
    # interval [0, pi], lambda = 1: boundary slope of sin is 1
    val, t = b.eigenfunction_boundary_bound(1.0, 0.0)
    assert val >= 1.0 and t > 0


# -- Neumann --------------------------------------------------------------

def test_neumann_upper_examples():
    assert b.neumann_upper_bound(0.0, 1.0) == pytest.approx(math.sqrt(2 * E / math.pi), abs=1e-14)
    assert b.neumann_upper_bound(0.0, 1.0) == pytest.approx(1.31549, abs=1e-5)
    assert b.neumann_upper_bound(1.0, 1.0) == pytest.approx(math.sqrt(8 / math.pi), abs=1e-14)
    assert b.neumann_upper_bound(-0.5, 1.0) == pytest.approx(math.sqrt(4 / math.pi), abs=1e-14)


def test_neumann_upper_limit_lambda_plus_k_zero():
    lim = b.neumann_upper_bound(-1.0, 1.0)
    assert lim == pytest.approx(math.sqrt(2 / math.pi), abs=1e-14)
    assert b.neumann_upper_bound(-1.0 + 1e-12, 1.0) == pytest.approx(lim, rel=1e-6)
    with pytest.raises(ValueError):
        b.neumann_upper_bound(-1.1, 1.0)


def test_neumann_lower_examples():
    assert b.neumann_lower_bound(GeometryParams(d=1), 1.0) == pytest.approx(0.60653066, abs=1e-8)
    assert b.neumann_lower_bound(GeometryParams(d=1), 4.0) == pytest.approx(2 / math.sqrt(E), abs=1e-14)
    g = GeometryParams(d=3, n=3, K=2.0)
    assert b.neumann_lower_bound(g, 2.0) == pytest.approx(math.sqrt(4 / 12 * 0.5), abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.0, 10))
def test_neumann_weak_forms_dominate(lam, K):
    g = GeometryParams(d=1, n=1, K=K)
    assert b.neumann_upper_bound(K, lam) <= b.neumann_upper_bound_weak(K, lam) * (1 + 1e-12)
    assert b.neumann_lower_bound_weak(g, lam) <= b.neumann_lower_bound(g, lam) * (1 + 1e-12)


# -- reference-function constants ----------------------------------------

X01 = np.linspace(0.0, 1.0, 2001)


def test_c_eps_constant_reference():
    rf = ReferenceFunction.constant(X01)
    assert b.compute_c_eps_f(rf, 0.5, 0.0, 0.0) == 0.0
    assert b.compute_c_eps_f(rf, 0.3, 2.0, 1.0) == pytest.approx(1.3, abs=1e-15)
    assert b.compute_c_eps_f(rf, 0.3, 2.0, 1.0, mode="unweighted") == pytest.approx(2.0)
    with pytest.raises(ValueError):
        b.compute_c_eps_f(rf, 1.0, 0.0)


def test_c_eps_quadratic_reference():
    rf = ReferenceFunction.from_callable(X01, lambda x: 1 + x**2)
    # analytic log-derivatives on a grid at double resolution
    x = np.linspace(0.0, 1.0, 4001)
    g2 = (2 * x / (1 + x**2)) ** 2
    lap = (2 - 2 * x**2) / (1 + x**2) ** 2
    oracle = float(np.max(4 * 0.5 / 0.5 * g2 - 2 * lap))
    assert oracle == pytest.approx(4.0, abs=1e-12)
    assert b.compute_c_eps_f(rf, 0.5, 0.0, 0.0) == pytest.approx(oracle, abs=1e-5)


def test_K_f():
    assert b.compute_K_f(ReferenceFunction.constant(X01), 0.0) == 0.0
    assert b.compute_K_f(ReferenceFunction.constant(X01), -1.0) == -1.0
    rf = ReferenceFunction.from_callable(X01, lambda x: 1 + x)
    assert b.compute_K_f(rf, 0.0) == pytest.approx(3.0, abs=1e-3)


def test_reference_function_requires_unit_infimum():
    with pytest.raises(ValueError):
        ReferenceFunction.from_callable(X01, lambda x: 2 + x)


def test_nonconvex_lower_examples():
    rf = ReferenceFunction.constant(X01)
    g = GeometryParams(d=1)
    grid = np.linspace(0.01, 0.99, 99)
    assert b.nonconvex_lower_bound(rf, g, 1.0, grid) == pytest.approx(math.sqrt(0.99 / E), abs=1e-14)
    assert b.nonconvex_lower_bound(rf, g, 4.0, grid) == pytest.approx(2 * math.sqrt(0.99 / E), abs=1e-14)
    g1 = GeometryParams(d=1, K=1.0, K_V=1.0)
    assert b.nonconvex_lower_bound(rf, g1, 1.0, [0.5]) == pytest.approx(math.sqrt(0.125), abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 50), st.floats(-0.9, 5.0), st.sampled_from([1.0, 2.0, 3.5]))
def test_nonconvex_reduces_for_constant_reference(lam, kfrac, n):
    K = kfrac * lam if kfrac < 0 else kfrac
    rf = ReferenceFunction.constant(X01)
    g = GeometryParams(d=1, n=n, K=K, K_V=K)
    assert abs(b.nonconvex_lower_bound(rf, g, lam) - b.neumann_lower_bound(g, lam)) <= 1e-12
    assert abs(b.nonconvex_upper_bound(rf, K, lam) - b.neumann_upper_bound(K, lam)) <= 1e-12


def test_nonconvex_weak_is_weaker():
    rf = ReferenceFunction.from_callable(X01, lambda x: 1 + x**2)
    g = GeometryParams(d=1, n=2, K=0.5, K_V=0.5)
    assert b.nonconvex_lower_bound_weak(rf, g, 3.0) <= b.nonconvex_lower_bound(rf, g, 3.0)


def test_lambda_must_be_positive():
    for fn in (b.dirichlet_lower_bound, b.neumann_lower_bound):
        with pytest.raises(ValueError):
            fn(GeometryParams(), 0.0)
