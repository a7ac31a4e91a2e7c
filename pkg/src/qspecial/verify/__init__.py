"""Identity verification: sweep engine and bilateral product formulas."""

from .engine import (
    SUITES,
    IdentityId,
    IdentityResidual,
    SweepConfig,
    default_tolerances,
    run_identity,
    run_suite,
)
from .product import Window, product_lhs_J, product_lhs_N, product_rhs_J, product_rhs_N

__all__ = [
    "SUITES",
    "IdentityId",
    "IdentityResidual",
    "SweepConfig",
    "default_tolerances",
    "run_identity",
    "run_suite",
    "Window",
    "product_lhs_J",
    "product_lhs_N",
    "product_rhs_J",
    "product_rhs_N",
]
