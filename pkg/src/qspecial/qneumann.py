"""q-Neumann functions: the second solution of the q-difference equation.

Noninteger order::

    N_nu(x) = [cos(pi nu) J_nu(x) - q**(-nu/2) J_{-nu}(q**(-nu/2) x)] / sin(pi nu)

Integer order comes from the nu-derivative of that numerator at nu = n, in two
algebraically equivalent closed forms: one with psi_q values
(:func:`q_neumann_int_psi_form`) and one with the q-Euler constant and
running prefix sums (:func:`q_neumann_int`, :func:`q_neumann_zero`). All
functions return N itself, not pi*N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from ._series import EPS
from .errors import ConvergenceError, DomainError, NearIntegerError
from .params import DEFAULT_POLICY, Evaluation, Flag, QParam, TruncationPolicy, as_q
from .qbessel import hahn_exton_j
from .qcore import (
    one_minus_qpow,
    q_euler_constant,
    q_factorial,
    q_gamma,
    q_gamma_residue,
    q_psi,
    q_rgamma,
)

__all__ = [
    "OrderClass",
    "q_neumann",
    "q_neumann_generic",
    "q_neumann_int",
    "q_neumann_zero",
    "q_neumann_int_psi_form",
    "q_neumann_negative",
    "q_neumann_negative_psi_form",
    "neumann_solution",
]

EPS_INT = 1e-8
NEAR_INT = 1e-4


@dataclass(frozen=True)
class OrderClass:
    """Integer/generic split of a real order.

    ``n`` is set iff the order lies within ``eps_int`` of an integer.
    ``risky`` marks the band eps_int < dist < near_int where the generic
    formula still runs but loses digits to 1/sin(pi nu).
    """

    raw: float
    n: int | None
    distance: float
    eps_int: float = EPS_INT
    near_int: float = NEAR_INT

    @classmethod
    def classify(cls, nu: float, eps_int: float = EPS_INT, near_int: float = NEAR_INT) -> OrderClass:
        m = round(nu)
        dist = abs(nu - m)
        return cls(nu, int(m) if dist <= eps_int else None, dist, eps_int, near_int)

    @property
    def is_integer(self) -> bool:
        return self.n is not None

    @property
    def risky(self) -> bool:
        return self.n is None and self.distance < self.near_int


def _check_x(x: float) -> None:
    if not x > 0:
        raise DomainError(f"N_nu needs x > 0, got x={x!r}")


def _merge(*evals: Evaluation) -> frozenset[Flag]:
    out: set[Flag] = set()
    for e in evals:
        out |= e.flags
    return frozenset(out)


def q_neumann_generic(
    nu: float,
    x: float,
    q: QParam | float,
    policy: TruncationPolicy = DEFAULT_POLICY,
    eps_int: float = EPS_INT,
    near_int: float = NEAR_INT,
) -> Evaluation:
    """N_nu(x; q) for noninteger nu from the cos/sin combination."""
    q = as_q(q)
    _check_x(x)
    order = OrderClass.classify(nu, eps_int, near_int)
    if order.is_integer:
        raise NearIntegerError(f"nu={nu!r} is within {eps_int} of an integer; use the integer form")
    m = round(nu)
    frac = nu - m
    parity = -1.0 if m % 2 else 1.0
    sin_nu = parity * math.sin(math.pi * frac)
    cos_nu = parity * math.cos(math.pi * frac)
    shift = q.value ** (-nu / 2)
    j_pos = hahn_exton_j(nu, x, q, policy)
    j_neg = hahn_exton_j(-nu, shift * x, q, policy)
    a = cos_nu * j_pos.value
    b = shift * j_neg.value
    value = (a - b) / sin_nu
    err = (abs(cos_nu) * j_pos.est_error + shift * j_neg.est_error + EPS * (abs(a) + abs(b))) / abs(sin_nu)
    flags = set(_merge(j_pos, j_neg))
    if order.risky:
        flags.add(Flag.CANCELLATION_RISK)
    return Evaluation(value, err, j_pos.terms_used + j_neg.terms_used, frozenset(flags))


def _finite_part(n: int, x: float, q: QParam, ratio: Callable[[int, int], float]) -> float:
    """sum_{k<n} Gamma_q(n-k)/Gamma_q(k+1) x**(2k-n), with ``ratio(n-k, k+1)`` supplying the gammas."""
    return math.fsum(ratio(n - k, k + 1) * x ** (2 * k - n) for k in range(n))


def _log_series(n: int, x: float, q: QParam, policy: TruncationPolicy) -> tuple[float, float, int]:
    """sum_{k>=0} t_k (sum_{l=1}^{k+n} q^l/(1-q^l) + sum_{l=1}^{k} 1/(1-q^l)).

    t_k are the J_n series terms. At n = 0 the bracket is
    sum_{l<=k} (1+q^l)/(1-q^l). Both prefix sums are carried along k.
    """
    logq = q.log_value
    qv = q.value
    x2 = (1.0 - qv) ** 2 * x * x
    t = x**n / q_factorial(n, q)
    s1 = math.fsum(math.exp(l * logq) / one_minus_qpow(l, logq) for l in range(1, n + 1))
    s2 = 0.0
    w = t * (s1 + s2)
    acc = w
    abs_sum = abs(w)
    run = 0
    k = 0
    terms = 1
    while True:
        qk1 = math.exp((k + 1) * logq)
        ratio = qk1 * x2 / (one_minus_qpow(k + 1, logq) * one_minus_qpow(k + n + 1, logq))
        t *= -ratio
        s1 += math.exp((k + n + 1) * logq) / one_minus_qpow(k + n + 1, logq)
        s2 += 1.0 / one_minus_qpow(k + 1, logq)
        k += 1
        w = t * (s1 + s2)
        if abs(ratio) < 0.5 and abs(w) <= policy.rel_tol * abs(acc):
            run += 1
            if run >= policy.stop_run:
                return acc, abs(w) + 4 * EPS * abs_sum, terms
        else:
            run = 0
        acc += w
        abs_sum += abs(w)
        terms += 1
        if terms >= policy.max_terms:
            raise ConvergenceError(f"q-Neumann series (n={n}, x={x}) did not converge")


def _int_closed_form(n: int, x: float, q: QParam, policy: TruncationPolicy) -> Evaluation:
    logq = q.log_value
    cq = q_euler_constant(q, policy)
    jn = hahn_exton_j(float(n), x, q, policy)
    head = jn.value * (math.log(x) + 0.25 * logq + cq.value)
    parts = [2.0 * head]
    if n > 0:
        fin = _finite_part(n, x, q, lambda a, b: q_factorial(a - 1, q) / q_factorial(b - 1, q))
        parts.append(logq / (1.0 - q.value) * fin)
    series, serr, k = _log_series(n, x, q, policy)
    parts.append(logq * series)
    value = math.fsum(parts) / math.pi
    err = (
        2.0 * abs(jn.est_error * (math.log(x) + 0.25 * logq + cq.value))
        + 2.0 * abs(jn.value) * cq.est_error
        + abs(logq) * serr
        + 4 * EPS * sum(abs(p) for p in parts)
    ) / math.pi
    return Evaluation(value, err, jn.terms_used + k + cq.terms_used, _merge(jn, cq))


def q_neumann_int(
    n: int, x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """N_n(x; q), n >= 1, in the q-Euler-constant form.

    pi N_n = 2 J_n (log(q^{1/4} x) + C_q)
             + log q/(1-q) sum_{k<n} Gamma_q(n-k)/Gamma_q(k+1) x^{2k-n}
             + log q sum_{k>=0} t_k (sum_{l<=k+n} q^l/(1-q^l) + sum_{l<=k} 1/(1-q^l))

    where t_k are the terms of J_n; the k = 0 summand is the trailing
    x^n/Gamma_q(n+1) sum_{l<=n} q^l/(1-q^l) correction.
    """
    if n < 1:
        raise DomainError("q_neumann_int needs n >= 1 (use q_neumann_zero for n = 0)")
    q = as_q(q)
    _check_x(x)
    return _int_closed_form(n, x, q, policy)


def q_neumann_zero(x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY) -> Evaluation:
    """N_0(x; q).

    pi N_0 = 2 J_0 (log(q^{1/4} x) + C_q)
             + log q sum_{k>=1} t_k sum_{l<=k} (1+q^l)/(1-q^l)
    """
    q = as_q(q)
    _check_x(x)
    return _int_closed_form(0, x, q, policy)


def _psi_form(n: int, x: float, q: QParam, policy: TruncationPolicy, k_sign: float) -> Evaluation:
    logq = q.log_value
    qv = q.value
    jn = hahn_exton_j(float(n), x, q, policy)
    parts = [2.0 * jn.value * (math.log(x) + 0.25 * logq)]
    if n > 0:
        fin = _finite_part(
            n, x, q, lambda a, b: q_gamma(float(a), q, policy).value * q_rgamma(float(b), q, policy)
        )
        parts.append(logq / (1.0 - qv) * fin)
    acc = 0.0
    abs_sum = 0.0
    run = 0
    k = 0
    while True:
        coef = (-1.0) ** k * qv ** (k * (k + 1) / 2) * x ** (2 * k + n)
        t = coef * q_rgamma(k + 1.0, q, policy) * q_rgamma(k + n + 1.0, q, policy)
        bracket = q_psi(k + n + 1.0, q, policy).value + q_psi(k + 1.0, q, policy).value + k_sign * k * logq
        w = t * bracket
        decaying = qv ** (k + 1) * (1.0 - qv) ** 2 * x * x < 0.5 * one_minus_qpow(k + 1, logq) ** 2
        if k > 0 and decaying and abs(w) <= policy.rel_tol * abs(acc):
            run += 1
            if run >= policy.stop_run:
                break
        else:
            run = 0
        acc += w
        abs_sum += abs(w)
        k += 1
        if k >= policy.max_terms:
            raise ConvergenceError(f"psi-form series (n={n}, x={x}) did not converge")
    parts.append(-acc)
    value = math.fsum(parts) / math.pi
    err = (abs(w) + 2 * jn.est_error * abs(math.log(x) + 0.25 * logq) + 8 * EPS * (abs_sum + sum(map(abs, parts)))) / math.pi
    return Evaluation(value, err, k + jn.terms_used, jn.flags)


def q_neumann_int_psi_form(
    n: int, x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """N_n(x; q), n >= 0, from the psi_q form of the order derivative.

    pi N_n = 2 J_n log(q^{1/4} x)
             + log q/(1-q) sum_{k<n} Gamma_q(n-k)/Gamma_q(k+1) x^{2k-n}
             - sum_{k>=0} t_k (psi_q(k+n+1) + psi_q(k+1) - k log q)

    Shares no series code with :func:`q_neumann_int`: every term
    coefficient and psi_q value is evaluated from scratch.
    """
    if n < 0:
        raise DomainError("q_neumann_int_psi_form needs n >= 0")
    q = as_q(q)
    _check_x(x)
    return _psi_form(n, x, q, policy, k_sign=-1.0)


def _integer_order(n: int, x: float, q: QParam, policy: TruncationPolicy) -> Evaluation:
    if n == 0:
        return q_neumann_zero(x, q, policy)
    if n > 0:
        return q_neumann_int(n, x, q, policy)
    return q_neumann_negative(-n, x, q, policy)


def q_neumann_negative(
    n: int, x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """N_{-n}(x; q) = (-1)**n q**(n/2) N_n(q**(n/2) x; q)."""
    if n < 1:
        raise DomainError("q_neumann_negative needs n >= 1")
    q = as_q(q)
    _check_x(x)
    c = (-1.0) ** n * q.value ** (n / 2)
    inner = q_neumann_int(n, q.value ** (n / 2) * x, q, policy)
    return Evaluation(c * inner.value, abs(c) * inner.est_error, inner.terms_used, inner.flags)


def q_neumann_negative_psi_form(
    n: int, x: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Evaluation:
    """N_{-n}(x; q) from the order derivative taken directly at nu = -n.

    pi N_{-n} = dJ_nu/dnu - (-1)**n d/dnu [q^{-nu/2} J_{-nu}(q^{-nu/2} x)]  at nu = -n.

    The J_nu derivative picks up the Gamma_q residues at the k < n terms;
    nothing is routed through N_n, so this referees the reflection relation.
    """
    if n < 1:
        raise DomainError("q_neumann_negative_psi_form needs n >= 1")
    q = as_q(q)
    _check_x(x)
    qv = q.value
    logq = q.log_value
    logx = math.log(x)
    parts = []
    # dJ_nu/dnu, pole terms k < n
    for k in range(n):
        res = q_gamma_residue(n - k - 1, q)
        parts.append((-1.0) ** k * qv ** (k * (k + 1) / 2) * x ** (2 * k - n) * q_rgamma(k + 1.0, q, policy) / res)

    def regular(k: int) -> tuple[float, float]:
        a = 0.0
        if k >= n:
            a = (
                (-1.0) ** k * qv ** (k * (k + 1) / 2) * x ** (2 * k - n)
                * q_rgamma(k + 1.0, q, policy) * q_rgamma(k - n + 1.0, q, policy)
            ) * (logx - q_psi(k - n + 1.0, q, policy).value)
        e = k * (k + 1) / 2 + n / 2 + n * k + n * n / 2
        b = (
            (-1.0) ** k * qv**e * x ** (2 * k + n)
            * q_rgamma(k + 1.0, q, policy) * q_rgamma(k + n + 1.0, q, policy)
        ) * (logq * (-0.5 - k - n) - logx + q_psi(k + n + 1.0, q, policy).value)
        return a, b

    sign_n = -1.0 if n % 2 else 1.0
    acc = 0.0
    abs_sum = 0.0
    run = 0
    k = 0
    while True:
        a, b = regular(k)
        w = a - sign_n * b
        abs_sum += abs(a) + abs(b)
        if k > n and abs(w) <= policy.rel_tol * abs(acc + math.fsum(parts)):
            run += 1
            if run >= policy.stop_run:
                break
        else:
            run = 0
        acc += w
        k += 1
        if k >= policy.max_terms:
            raise ConvergenceError("negative-order psi form did not converge")
    total = math.fsum(parts) + acc
    err = (abs(w) + 16 * EPS * (sum(map(abs, parts)) + abs_sum)) / math.pi
    return Evaluation(total / math.pi, err, k)


def q_neumann(
    nu: float,
    x: float,
    q: QParam | float,
    policy: TruncationPolicy = DEFAULT_POLICY,
    eps_int: float = EPS_INT,
    near_int: float = NEAR_INT,
) -> Evaluation:
    """N_nu(x; q) for any real order, dispatching on :class:`OrderClass`."""
    q = as_q(q)
    _check_x(x)
    order = OrderClass.classify(nu, eps_int, near_int)
    if order.is_integer:
        return _integer_order(order.n, x, q, policy)
    return q_neumann_generic(nu, x, q, policy, eps_int, near_int)


def neumann_solution(
    nu: float, q: QParam | float, policy: TruncationPolicy = DEFAULT_POLICY
) -> Callable[[float], float]:
    """N_nu(., q) as a plain callable, for the residual checks."""
    q = as_q(q)
    return lambda x: q_neumann(nu, x, q, policy).value
