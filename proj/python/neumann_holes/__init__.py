"""Neumann eigenvalue perturbation toolkit.

FEM solvers, closed-form oracles and sweep harness for eigenvalues of the
Neumann Laplacian on domains with a small excised hole.
"""

from ._core import (  # noqa: F401
    Mesh,
    NeumannHolesError,
    annulus_series_torsion,
    assemble,
    bessel_j0,
    bessel_j0_prime_zero,
    bessel_j0_zero,
    bessel_j1,
    box_spectrum,
    classify_sign,
    disk_spectrum,
    exterior_ball_torsion,
    fem_torsion,
    gamma_indicator,
    generate_mesh,
    load_mesh,
    mesh_quality,
    predict_shift_2d,
    predict_shift_nd_regular,
    predict_shift_nd_singular,
    radial_ode_check,
    refine_uniform,
    run_sweep_toml,
    smalleig_check,
    solve_modes,
    verify_all,
)

__all__ = [
    "Mesh",
    "NeumannHolesError",
    "annulus_series_torsion",
    "assemble",
    "bessel_j0",
    "bessel_j0_prime_zero",
    "bessel_j0_zero",
    "bessel_j1",
    "box_spectrum",
    "classify_sign",
    "disk_spectrum",
    "exterior_ball_torsion",
    "fem_torsion",
    "gamma_indicator",
    "generate_mesh",
    "load_mesh",
    "mesh_quality",
    "predict_shift_2d",
    "predict_shift_nd_regular",
    "predict_shift_nd_singular",
    "radial_ode_check",
    "refine_uniform",
    "run_sweep_toml",
    "smalleig_check",
    "solve_modes",
    "verify_all",
]
