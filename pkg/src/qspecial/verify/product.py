"""Bilateral product formulas for J and N.

Both sums are taken in the Hahn-Exton normalization

    Jh_nu(t) = J_nu(t / (1-q); q),    Nh_nu(t) = N_nu(t / (1-q); q),

which is the normalization in which the product formula holds; with the
(1-q)-scaled series argument the two sides disagree at O(1). The first two
factors live on the lattice t = q**(z/2), where they decay
super-exponentially as z -> -inf and are taken from :func:`j_lattice`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .._series import EPS
from ..errors import ConvergenceError, DivergenceError, PreconditionError
from ..params import DEFAULT_POLICY, Evaluation, Flag, QParam, TruncationPolicy, as_q
from ..qbessel import hahn_exton_j, j_lattice
from ..qneumann import q_neumann

__all__ = [
    "Window",
    "product_lhs_J",
    "product_rhs_J",
    "product_lhs_N",
    "product_rhs_N",
]

MAX_ENLARGEMENTS = 60


@dataclass(frozen=True)
class Window:
    """Initial summation window and growth guard for the bilateral sums."""

    z_min: int = -40
    z_max: int = 80
    growth_guard: float = 1e6
    step_low: int = 10
    step_high: int = 40

    def __post_init__(self):
        if not self.z_min < 0 < self.z_max:
            raise ValueError("window must satisfy z_min < 0 < z_max")
        if self.step_low < 1 or self.step_high < 1:
            raise ValueError("window steps must be positive")


def _he_j(nu: float, t: float, q: QParam, policy: TruncationPolicy) -> Evaluation:
    return hahn_exton_j(nu, t / (1.0 - q.value), q, policy)


def _bilateral(
    a_order: float,
    b_order: float,
    third: Callable[[int], float],
    q: QParam,
    window: Window,
    policy: TruncationPolicy,
) -> Evaluation:
    """sum_z q**z Jh_a(q**(z/2)) Jh_b(q**(z/2)) third(z) with adaptive two-sided window."""
    cache: dict[int, float] = {}
    qv = q.value

    def terms(lo: int, hi: int) -> tuple[dict[int, float], float]:
        ja, ea = j_lattice(a_order, q, lo, hi, policy)
        jb, eb = j_lattice(b_order, q, lo, hi, policy)
        out = {}
        for i, z in enumerate(range(lo, hi + 1)):
            w = qv**z * ja[i] * jb[i]
            if w == 0.0:
                # underflow deep in the lattice decay
                out[z] = 0.0
                continue
            if z not in cache:
                cache[z] = third(z)
            out[z] = w * cache[z]
            if not math.isfinite(out[z]):
                raise DivergenceError(f"bilateral sum: non-finite term at z={z}")
        return out, ea + eb

    lo, hi = window.z_min, window.z_max
    current, lat_err = terms(lo, hi)
    total = math.fsum(current.values())
    quiet = 0
    last_delta = 0.0
    for _ in range(MAX_ENLARGEMENTS):
        new_lo, new_hi = lo - window.step_low, hi + window.step_high
        enlarged, lat_err = terms(new_lo, new_hi)
        new_total = math.fsum(enlarged.values())
        low_block = [abs(enlarged[z]) for z in range(new_lo, lo)]
        if low_block and max(low_block) > window.growth_guard * max(abs(total), 1e-300):
            raise DivergenceError(
                f"bilateral sum: terms near z={new_lo} reach {max(low_block):.3g}, past the growth guard"
            )
        last_delta = new_total - total
        lo, hi, current, total = new_lo, new_hi, enlarged, new_total
        if abs(last_delta) <= policy.rel_tol * abs(total):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceError("bilateral sum did not settle")

    flags = {Flag.SLOW_CONVERGENCE} if q.slow else set()
    below = [abs(current[z]) for z in range(lo, 0)]
    if below:
        # tail growth before the turnover: the largest negative-z term is not next to z = 0
        peak = max(range(len(below)), key=below.__getitem__)
        if peak < len(below) - 2:
            flags.add(Flag.SLOW_CONVERGENCE)
    abs_total = math.fsum(abs(v) for v in current.values())
    err = abs(last_delta) + (lat_err + 8 * EPS) * abs_total + EPS * abs_total * math.sqrt(hi - lo)
    return Evaluation(total, err, hi - lo + 1, frozenset(flags))


def _check_common(r: float, condition: float) -> None:
    if r == 0:
        raise PreconditionError("product formula requires r != 0")
    if r < 0:
        raise PreconditionError("only real r > 0 is supported")
    if condition >= 1.0:
        raise PreconditionError(f"convergence condition r^2 q^(1+x+y) < 1 fails (value {condition:.6g})")


def product_lhs_J(
    x: float,
    y: float,
    nu: float,
    r: float,
    q: QParam | float,
    window: Window = Window(),
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> Evaluation:
    """sum_z q^z Jh_x(q^{z/2}) Jh_{x-nu}(q^{z/2}) Jh_nu(r q^{(y+nu+z)/2})."""
    q = as_q(q)
    if not x > -1:
        raise PreconditionError(f"product formula requires x > -1, got {x!r}")
    _check_common(r, r * r * q.value ** (1.0 + x + y))

    def third(z: int) -> float:
        return _he_j(nu, r * q.value ** ((y + nu + z) / 2), q, policy).value

    return _bilateral(x, x - nu, third, q, window, policy)


def product_rhs_J(
    x: float, y: float, nu: float, r: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """Jh_0(r q^{(x+y)/2}) Jh_nu(r q^{(nu+y)/2})."""
    q = as_q(q)
    a = _he_j(0.0, r * q.value ** ((x + y) / 2), q, policy)
    b = _he_j(nu, r * q.value ** ((nu + y) / 2), q, policy)
    return Evaluation(
        a.value * b.value,
        abs(a.value) * b.est_error + abs(b.value) * a.est_error,
        a.terms_used + b.terms_used,
        a.flags | b.flags,
    )


def _check_n_order(nu: float) -> None:
    # the J_{-nu} half of N needs -nu/2 > -1 as well as nu/2 > -1
    if not -2.0 < nu < 2.0:
        raise PreconditionError(f"N product formula requires -2 < nu < 2, got {nu!r}")


def product_lhs_N(
    nu: float,
    r: float,
    q: QParam | float,
    window: Window = Window(),
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> Evaluation:
    """sum_z q^z Jh_{nu/2}(q^{z/2}) Jh_{-nu/2}(q^{z/2}) Nh_nu(r q^{nu/4 + z/2})."""
    q = as_q(q)
    _check_n_order(nu)
    _check_common(r, r * r * q.value)

    def third(z: int) -> float:
        t = r * q.value ** (nu / 4 + z / 2)
        return q_neumann(nu, t / (1.0 - q.value), q, policy).value

    return _bilateral(nu / 2, -nu / 2, third, q, window, policy)


def product_rhs_N(
    nu: float, r: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """Jh_0(r) Nh_nu(r q^{nu/4})."""
    q = as_q(q)
    _check_n_order(nu)
    a = _he_j(0.0, r, q, policy)
    b = q_neumann(nu, r * q.value ** (nu / 4) / (1.0 - q.value), q, policy)
    return Evaluation(
        a.value * b.value,
        abs(a.value) * b.est_error + abs(b.value) * a.est_error,
        a.terms_used + b.terms_used,
        a.flags | b.flags,
    )
