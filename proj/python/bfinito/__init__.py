"""Bregman Finito/MISO solvers for relatively smooth finite sums.

Thin Python surface over the C++ core: synthetic phase-retrieval instances,
Legendre kernels with Bregman distances, the closed-form subproblem solvers,
and the experiment runner (`run`) that mirrors the command-line tool.
"""

from ._bfinito import (
    Instance,
    Kernel,
    Problem,
    bregman,
    build_problem,
    cardano_positive_root,
    cost,
    euclidean_kernel,
    generate_instance,
    hadamard,
    initial_point,
    load_instance,
    lyapunov,
    make_poisson_instance,
    make_squared_instance,
    op_residual,
    poisson_kernel,
    problem_from_instance,
    project_l0_ball,
    quartic_kernel,
    run,
    run_on_problem,
    soft_threshold,
    spectral_init,
    strconvex_rate_bound,
    t_solve_poisson_l1,
    t_solve_quartic_l0,
    t_solve_quartic_l1,
    toy_problem,
)

__all__ = [
    "Instance",
    "Kernel",
    "Problem",
    "bregman",
    "build_problem",
    "cardano_positive_root",
    "cost",
    "euclidean_kernel",
    "generate_instance",
    "hadamard",
    "initial_point",
    "load_instance",
    "lyapunov",
    "make_poisson_instance",
    "make_squared_instance",
    "op_residual",
    "poisson_kernel",
    "problem_from_instance",
    "project_l0_ball",
    "quartic_kernel",
    "run",
    "run_on_problem",
    "soft_threshold",
    "spectral_init",
    "strconvex_rate_bound",
    "t_solve_poisson_l1",
    "t_solve_quartic_l0",
    "t_solve_quartic_l1",
    "toy_problem",
]
