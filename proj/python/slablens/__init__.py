"""Helmholtz slab lens with permittivity -1 - i delta: dispersion, fields, energies."""

from ._core import (
    DomainError,
    Params,
    QuadratureError,
    RootStatusError,
    Source,
    L_integrand,
    energy,
    field_map,
    find_roots,
    g_delta,
    g_zero,
    gamma_star,
    lambda_gamma,
    reconstruct,
    run_cli,
    v_hat,
)

__version__ = "0.1.0"
