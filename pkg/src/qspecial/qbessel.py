"""Hahn-Exton q-Bessel function and its q-difference equation.

    J_nu(x; q) = sum_{k>=0} (-1)**k q**(k(k+1)/2) x**(2k+nu)
                            / (Gamma_q(k+1) Gamma_q(k+nu+1))

The series is summed with the term ratio

    t_{k+1} / t_k = -q**(k+1) (1-q)**2 x**2 / ((1 - q**(k+1)) (1 - q**(k+nu+1)))

so Gamma_q is only evaluated once, for the leading coefficient.
"""

from __future__ import annotations

import math
from typing import Callable, Protocol

from ._series import EPS
from .errors import ConvergenceError, DomainError
from .params import DEFAULT_POLICY, Evaluation, Flag, QParam, TruncationPolicy, as_q
from .qcore import one_minus_qpow, q_rgamma

__all__ = [
    "SolutionEvaluator",
    "hahn_exton_j",
    "j_negative_int",
    "j_limit_series",
    "j_lattice",
    "bessel_solution",
    "diff_eq_residual",
    "diff_eq_terms",
]

#: Orders this close to a negative integer go through the integer relation.
INT_EPS = 1e-8
#: Ratio sum|t_k| / |sum t_k| above which CancellationRisk is set.
CANCELLATION_RATIO = 1e6


class SolutionEvaluator(Protocol):
    """x -> f(x) for a fixed order and base; J and N both qualify."""

    def __call__(self, x: float) -> float: ...


def _series(
    nu: float, x: float, q: QParam, policy: TruncationPolicy, lead: float, k0: int = 0
) -> Evaluation:
    """Sum the J-type series starting from ``lead`` = t_{k0}.

    ``k0`` shifts the term ratio so that negative integer orders can start at
    the first nonvanishing term.
    """
    logq = q.log_value
    x2 = (1.0 - q.value) ** 2 * x * x
    t = lead
    s = t
    abs_sum = abs(t)
    run = 0
    k = k0
    qk = math.exp(k * logq)
    n = 1
    while True:
        qk *= q.value
        ratio = qk * x2 / (one_minus_qpow(k + 1, logq) * one_minus_qpow(k + nu + 1, logq))
        t *= -ratio
        k += 1
        shrinking = abs(ratio) < 0.5
        if shrinking and abs(t) <= policy.rel_tol * abs(s):
            run += 1
            if run >= policy.stop_run:
                # t is already the first term we do not add
                break
        else:
            run = 0
        s += t
        abs_sum += abs(t)
        n += 1
        if n >= policy.max_terms:
            raise ConvergenceError(f"J series (nu={nu}, x={x}) did not converge")
    flags = {Flag.SLOW_CONVERGENCE} if q.slow else set()
    if abs_sum > CANCELLATION_RATIO * abs(s):
        flags.add(Flag.CANCELLATION_RISK)
    return Evaluation(s, abs(t) + 4 * EPS * abs_sum, n, frozenset(flags))


def _nearest_negative_int(nu: float) -> int | None:
    n = round(nu)
    if n < 0 and abs(nu - n) <= INT_EPS:
        return int(n)
    return None


def hahn_exton_j(
    nu: float, x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """J_nu(x; q) for real order and x >= 0.

    Negative integer orders are evaluated through :func:`j_negative_int`;
    any other negative order uses the series directly.
    """
    q = as_q(q)
    if x < 0 or math.isnan(x):
        raise DomainError(f"J_nu needs x >= 0, got x={x!r}")
    neg = _nearest_negative_int(nu)
    if x == 0.0:
        if nu < 0:
            raise DomainError("J_nu(0) is undefined for nu < 0")
        return Evaluation(1.0 if nu == 0 else 0.0, 0.0, 1)
    if neg is not None:
        return j_negative_int(-neg, x, q, policy)
    lead = x**nu * q_rgamma(nu + 1.0, q, policy)
    return _series(nu, x, q, policy, lead)


def j_negative_int(
    n: int, x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """J_{-n}(x; q) = (-1)**n q**(n/2) J_n(q**(n/2) x; q)."""
    if n < 1:
        raise DomainError("j_negative_int needs n >= 1")
    q = as_q(q)
    if x < 0:
        raise DomainError(f"J_nu needs x >= 0, got x={x!r}")
    c = (-1.0) ** n * q.value ** (n / 2)
    inner = hahn_exton_j(float(n), q.value ** (n / 2) * x, q, policy)
    return Evaluation(c * inner.value, abs(c) * inner.est_error, inner.terms_used, inner.flags)


def j_limit_series(
    n: int, x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """J_{-n}(x; q) straight from the defining series with 1/Gamma_q(pole) = 0.

    Terms k < n vanish; the sum starts at k = n. Used as the referee for
    :func:`j_negative_int`.
    """
    if n < 1:
        raise DomainError("j_limit_series needs n >= 1")
    q = as_q(q)
    if x <= 0:
        raise DomainError(f"j_limit_series needs x > 0, got x={x!r}")
    nu = -float(n)
    sign = -1.0 if n % 2 else 1.0
    lead = (
        sign
        * q.value ** (n * (n + 1) / 2)
        * x**n
        * q_rgamma(n + 1.0, q, policy)
        * q_rgamma(1.0, q, policy)
    )
    return _series(nu, x, q, policy, lead, k0=n)


def j_lattice(
    nu: float, q: QParam | float, z_lo: int, z_hi: int, policy: TruncationPolicy = DEFAULT_POLICY
) -> tuple[list[float], float]:
    """J_nu(q**(z/2) / (1-q); q) for integers z_lo <= z <= z_hi.

    On this lattice J decays super-exponentially as z -> -inf and the power
    series loses every digit to cancellation there. Values for z < 0 come
    from the three-term recurrence of the q-difference equation run upward
    from far below z_lo (Miller's algorithm), normalized against the series
    on z = 0..3. Returns the values and a relative error estimate.
    """
    q = as_q(q)
    anchor = range(0, 4)
    start = min(z_lo, 0) - 16
    top = anchor[-1]
    qv = q.value
    c = qv ** (-nu / 2)
    qnu = qv**nu
    # f(z+1) = -f(z-1) - q**(-nu/2) (q**z - q**nu - 1) f(z)
    f = [0.0, 1e-300]
    zs = [start - 1, start]
    while zs[-1] < top:
        z = zs[-1]
        nxt = -f[-2] - c * (qv**z - qnu - 1.0) * f[-1]
        f.append(nxt)
        zs.append(z + 1)
        if abs(nxt) > 1e250:
            f = [v * 1e-250 for v in f]
    pos = {z: i for i, z in enumerate(zs)}
    norm = max(abs(f[pos[z]]) for z in anchor)
    f = [v / norm for v in f]
    ref = [hahn_exton_j(nu, qv ** (z / 2) / (1.0 - qv), q, policy).value for z in anchor]
    num = sum(f[pos[z]] * r for z, r in zip(anchor, ref))
    den = sum(f[pos[z]] ** 2 for z in anchor)
    lam = num / den
    mismatch = max(abs(lam * f[pos[z]] - r) for z, r in zip(anchor, ref))
    scale = max(abs(r) for r in ref)
    out = []
    for z in range(z_lo, z_hi + 1):
        if z >= 0:
            out.append(hahn_exton_j(nu, qv ** (z / 2) / (1.0 - qv), q, policy).value)
        else:
            out.append(lam * f[pos[z]])
    return out, mismatch / scale + 64 * EPS


def bessel_solution(
    nu: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Callable[[float], float]:
    """J_nu(., q) as a plain callable, for :func:`diff_eq_residual`."""
    q = as_q(q)
    return lambda x: hahn_exton_j(nu, x, q, policy).value


def diff_eq_terms(
    f: SolutionEvaluator, nu: float, x: float, q: QParam | float
) -> tuple[float, float, float]:
    """The three summands of the q-difference equation at x."""
    q = as_q(q)
    if not x > 0:
        raise DomainError(f"difference equation is checked on x > 0, got x={x!r}")
    qv = q.value
    rq = math.sqrt(qv)
    a = f(rq * x)
    b = f(x / rq)
    c = qv ** (-nu / 2) * ((1.0 - qv) ** 2 * x * x - qv**nu - 1.0) * f(x)
    return a, b, c


def diff_eq_residual(f: SolutionEvaluator, nu: float, x: float, q: QParam | float) -> float:
    """Normalized residual of f(q^{1/2}x) + f(q^{-1/2}x) + q^{-nu/2}((1-q)^2x^2 - q^nu - 1) f(x).

    The sum is divided by the largest of the three summands (0 when all vanish).
    """
    terms = diff_eq_terms(f, nu, x, q)
    scale = max(abs(t) for t in terms)
    if scale == 0.0:
        return 0.0
    return math.fsum(terms) / scale
