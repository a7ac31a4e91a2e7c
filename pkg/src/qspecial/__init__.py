"""q-gamma, q-psi, Hahn-Exton q-Bessel and q-Neumann functions."""

from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    NearIntegerError,
    PoleError,
    PreconditionError,
    QSpecialError,
)
from .params import DEFAULT_POLICY, Evaluation, Flag, QParam, TruncationPolicy
from .qbessel import bessel_solution, diff_eq_residual, hahn_exton_j, j_negative_int
from .qcore import (
    log_q_gamma,
    psi_over_gamma_limit,
    q_euler_constant,
    q_gamma,
    q_gamma_residue,
    q_psi,
    q_psi_residue,
    q_rgamma,
)
from .qneumann import neumann_solution, q_neumann, q_neumann_int, q_neumann_negative

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "NearIntegerError",
    "PoleError",
    "PreconditionError",
    "QSpecialError",
    "DEFAULT_POLICY",
    "Evaluation",
    "Flag",
    "QParam",
    "TruncationPolicy",
    "bessel_solution",
    "diff_eq_residual",
    "hahn_exton_j",
    "j_negative_int",
    "log_q_gamma",
    "psi_over_gamma_limit",
    "q_euler_constant",
    "q_gamma",
    "q_gamma_residue",
    "q_psi",
    "q_psi_residue",
    "q_rgamma",
    "neumann_solution",
    "q_neumann",
    "q_neumann_int",
    "q_neumann_negative",
]
