"""q-gamma, q-psi and the q-Euler constant.

The q-gamma function uses the standard normalization

    Gamma_q(nu) = (1-q)**(1-nu) * prod_{l>=1} (1 - q**l) / (1 - q**(nu+l-1)),

so that Gamma_q(1) = 1, Gamma_q(n+1) = [n]_q! and psi_q = d/dnu log Gamma_q is

    psi_q(nu) = -log(1-q) + log(q) * sum_{l>=0} q**(nu+l) / (1 - q**(nu+l)).

Poles sit at nu = 0, -1, -2, ...
"""

from __future__ import annotations

import math
from functools import lru_cache

from ._series import EPS, sum_geometric
from .errors import PoleError
from .params import (
    DEFAULT_POLICY,
    Evaluation,
    Flag,
    QParam,
    TruncationPolicy,
    as_q,
)

__all__ = [
    "q_number",
    "q_factorial",
    "log_q_gamma",
    "q_gamma",
    "q_rgamma",
    "q_psi",
    "q_euler_constant",
    "q_gamma_residue",
    "q_psi_residue",
    "psi_over_gamma_limit",
    "check_pole",
]

#: Inside this distance of a pole (but outside ``pole_eps``) results carry NearPole.
NEAR_POLE_ZONE = 1e-4


def one_minus_qpow(u: float, logq: float) -> float:
    """1 - q**u without cancellation for u near 0."""
    return -math.expm1(u * logq)


def q_number(nu: float, q: QParam | float) -> float:
    """[nu]_q = (1 - q**nu) / (1 - q)."""
    q = as_q(q)
    return one_minus_qpow(nu, q.log_value) / one_minus_qpow(1.0, q.log_value)


def q_factorial(n: int, q: QParam | float) -> float:
    """[n]_q! as a finite product, equal to Gamma_q(n+1)."""
    if n < 0:
        raise ValueError("q_factorial needs n >= 0")
    q = as_q(q)
    out = 1.0
    for j in range(1, n + 1):
        out *= q_number(j, q)
    return out


def check_pole(nu: float, policy: TruncationPolicy) -> set[Flag]:
    """Raise PoleError inside the pole guard; return NearPole flags in the warning zone."""
    if nu > 0.5:
        return set()
    n = round(nu)
    dist = abs(nu - n)
    if n <= 0 and dist <= policy.pole_eps:
        raise PoleError(nu, int(n))
    if n <= 0 and dist < NEAR_POLE_ZONE:
        return {Flag.NEAR_POLE}
    return set()


def _base_flags(q: QParam) -> set[Flag]:
    return {Flag.SLOW_CONVERGENCE} if q.slow else set()


def _log_gamma_parts(nu: float, q: QParam, policy: TruncationPolicy):
    """log|Gamma_q(nu)|, its sign, the error estimate, and the term count."""
    logq = q.log_value
    prefactor = (1.0 - nu) * math.log1p(-q.value)

    shift = one_minus_qpow(nu - 1.0, logq)

    def term(l: int) -> float:
        # log((1 - q**l) / (1 - q**u)) = log1p(-q**l (1 - q**(nu-1)) / (1 - q**u))
        u = nu + l - 1
        den = one_minus_qpow(u, logq)
        if u > 0:
            return math.log1p(-math.exp(l * logq) * shift / den)
        return math.log(one_minus_qpow(l, logq)) - math.log(abs(den))

    s, tail, n = sum_geometric(term, q.value, policy, start=1, offset=prefactor, what="log_q_gamma")
    # factors 1 - q**(nu+l-1) are negative exactly when nu + l - 1 < 0
    negatives = max(0, math.ceil(-nu)) if nu < 0 else 0
    sign = -1.0 if negatives % 2 else 1.0
    value = prefactor + s
    return value, sign, tail + EPS * abs(prefactor), n


def log_q_gamma(
    nu: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """log|Gamma_q(nu)|.

    For nu < 0 Gamma_q may be negative; :func:`q_gamma` restores the sign.
    """
    q = as_q(q)
    flags = check_pole(nu, policy) | _base_flags(q)
    value, _, err, n = _log_gamma_parts(nu, q, policy)
    return Evaluation(value, err, n, frozenset(flags))


def q_gamma(nu: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY) -> Evaluation:
    """Gamma_q(nu) with a relative error carried over from the log-series."""
    q = as_q(q)
    flags = check_pole(nu, policy) | _base_flags(q)
    logv, sign, err, n = _log_gamma_parts(nu, q, policy)
    value = sign * math.exp(logv)
    return Evaluation(value, abs(value) * math.expm1(err), n, frozenset(flags))


def q_rgamma(nu: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """1 / Gamma_q(nu), exactly zero at the poles.

    Nonpositive arguments are shifted up with the functional equation
    Gamma_q(nu+1) = [nu]_q Gamma_q(nu), so no pole guard applies.
    """
    q = as_q(q)
    if nu > 0.5:
        logv, sign, _, _ = _log_gamma_parts(nu, q, policy)
        return sign * math.exp(-logv)
    m = math.ceil(1.0 - nu)
    prod = 1.0
    for j in range(m):
        prod *= q_number(nu + j, q)
    if prod == 0.0:
        return 0.0
    logv, sign, _, _ = _log_gamma_parts(nu + m, q, policy)
    return prod * sign * math.exp(-logv)


def q_psi(nu: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY) -> Evaluation:
    """psi_q(nu) = d/dnu log Gamma_q(nu)."""
    q = as_q(q)
    flags = check_pole(nu, policy) | _base_flags(q)
    logq = q.log_value
    offset = -math.log1p(-q.value)

    def term(l: int) -> float:
        u = nu + l
        return logq * math.exp(u * logq) / one_minus_qpow(u, logq)

    s, tail, n = sum_geometric(term, q.value, policy, start=0, offset=offset, what="q_psi")
    return Evaluation(offset + s, tail + EPS * abs(offset), n, frozenset(flags))


@lru_cache(maxsize=256)
def _euler_cached(q: QParam, policy: TruncationPolicy) -> Evaluation:
    psi1 = q_psi(1.0, q, policy)
    return Evaluation(-psi1.value, psi1.est_error, psi1.terms_used, psi1.flags)


def q_euler_constant(q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY) -> Evaluation:
    """C_q = -psi_q(1); tends to the Euler-Mascheroni constant as q -> 1."""
    return _euler_cached(as_q(q), policy)


def q_gamma_residue(n: int, q: QParam | float) -> float:
    """Residue of Gamma_q at nu = -n.

    (-1)**n * q**(n(n+1)/2) * (q - 1) / (log(q) * [n]_q!)
    """
    if n < 0:
        raise ValueError("residue order must be >= 0")
    q = as_q(q)
    sign = -1.0 if n % 2 else 1.0
    return sign * q.value ** (n * (n + 1) / 2) * (q.value - 1.0) / (q.log_value * q_factorial(n, q))


def q_psi_residue(n: int, q: QParam | float) -> float:
    """Residue of psi_q at nu = -n, which is -1 for every n and q."""
    if n < 0:
        raise ValueError("residue order must be >= 0")
    as_q(q)
    return -1.0


def psi_over_gamma_limit(n: int, q: QParam | float) -> float:
    """lim_{nu -> -n} psi_q(nu) / Gamma_q(nu).

    (-1)**n * q**(-n(n+1)/2) * log(q) / (1 - q) * [n]_q!
    """
    if n < 0:
        raise ValueError("limit order must be >= 0")
    q = as_q(q)
    sign = -1.0 if n % 2 else 1.0
    return sign * q.value ** (-n * (n + 1) / 2) * q.log_value / (1.0 - q.value) * q_factorial(n, q)
