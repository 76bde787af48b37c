"""Explicit gradient bounds for Laplacian eigenfunctions and their numerical verification."""
from .bounds import (
    BoundSet,
    GeometryParams,
    ReferenceFunction,
    best_dirichlet_bounds,
    convention_power,
    dirichlet_lower_bound,
    dirichlet_upper_bound,
    dirichlet_upper_bounds,
    eps_max_closed_form,
    intro_c1_c2,
    neumann_lower_bound,
    neumann_upper_bound,
    psi_gradient_bound_f,
    nonconvex_lower_bound,
    nonconvex_upper_bound,
)
from .domains import DomainSpec, make_ball, make_circle, make_interval
from .eigensolver import EigenPair, boundary_gradient, gradient_ratio, solve
from .montecarlo import MCConfig, fpt_probability_exact, simulate_fpt, simulate_killed_diffusion
from .report import VerificationReport

__all__ = [
    "BoundSet", "GeometryParams", "ReferenceFunction", "best_dirichlet_bounds",
    "convention_power", "dirichlet_lower_bound", "dirichlet_upper_bound",
    "dirichlet_upper_bounds", "eps_max_closed_form", "intro_c1_c2", "neumann_lower_bound",
    "neumann_upper_bound", "psi_gradient_bound_f", "nonconvex_lower_bound", "nonconvex_upper_bound",
    "DomainSpec", "make_ball", "make_circle", "make_interval", "EigenPair",
    "boundary_gradient", "gradient_ratio", "solve", "MCConfig", "fpt_probability_exact",
    "simulate_fpt", "simulate_killed_diffusion", "VerificationReport",
]
