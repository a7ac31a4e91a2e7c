"""Reference implementations that referee the q-functions.

Everything here is deliberately plain and shares no code with the series
evaluators: classical digamma/Bessel/Neumann functions for the q -> 1 limit,
central differences, near-pole extrapolation, and compensated sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import ConvergenceError

__all__ = [
    "ResidueEstimate",
    "neumaier_sum",
    "classical_euler_constant",
    "classical_digamma",
    "classical_bessel_j",
    "classical_neumann_y",
    "finite_difference",
    "extrapolate_limit",
    "estimate_residue",
    "direct_q_gamma",
    "direct_q_psi",
    "direct_j_series",
]

DEFAULT_EPS = (1e-3, 1e-4, 1e-5)


def neumaier_sum(values: Iterable[float]) -> float:
    """Kahan-Babuska (Neumaier) compensated sum."""
    s = 0.0
    c = 0.0
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


@lru_cache(maxsize=8)
def classical_euler_constant(n: int = 10**7) -> float:
    """Euler-Mascheroni constant as H_n - log n - 1/(2n).

    The remaining error is about 1/(12 n**2).
    """
    harmonic = math.fsum(1.0 / l for l in range(1, n + 1))
    return harmonic - math.log(n) - 0.5 / n


def classical_digamma(nu: float, cutoff: int = 20000) -> float:
    """psi(nu) = -C + sum_{l>=0} (1/(l+1) - 1/(nu+l)) for nu > 0.

    The first ``cutoff`` terms are summed exactly; the rest is replaced by its
    Euler-Maclaurin integral with three correction terms.
    """
    if not nu > 0:
        raise ValueError(f"classical_digamma needs nu > 0, got {nu!r}")
    if cutoff > 10**8:
        raise ConvergenceError("cutoff beyond the 1e8 term cap")
    head = math.fsum(1.0 / (l + 1) - 1.0 / (nu + l) for l in range(cutoff))
    L = float(cutoff)

    def f(l: float) -> float:
        return 1.0 / (l + 1) - 1.0 / (nu + l)

    def d1(l: float) -> float:
        return -1.0 / (l + 1) ** 2 + 1.0 / (nu + l) ** 2

    def d3(l: float) -> float:
        return -6.0 / (l + 1) ** 4 + 6.0 / (nu + l) ** 4

    tail = math.log((L + nu) / (L + 1)) + f(L) / 2 - d1(L) / 12 + d3(L) / 720
    return -classical_euler_constant() + head + tail


def classical_bessel_j(n: int, z: float) -> float:
    """J_n(z) from its power series, stopped below 1e-15 relative."""
    if n < 0 or z < 0:
        raise ValueError("classical_bessel_j needs n >= 0 and z >= 0")
    half = z / 2.0
    t = half**n / math.factorial(n)
    terms = [t]
    k = 0
    while True:
        t *= -(half * half) / ((k + 1) * (k + n + 1))
        k += 1
        terms.append(t)
        if abs(t) < 1e-15 * abs(neumaier_sum(terms)) and k > half:
            return neumaier_sum(terms)


def classical_neumann_y(n: int, z: float) -> float:
    """Y_n(z), integer n >= 0, from the logarithmic series.

    pi Y_n = 2 J_n(z) log(z/2) - sum_{k<n} (n-k-1)!/k! (z/2)**(2k-n)
             - sum_{k>=0} (-1)**k (psi(k+1) + psi(n+k+1)) (z/2)**(2k+n) / (k! (n+k)!)
    """
    if n < 0 or not z > 0:
        raise ValueError("classical_neumann_y needs n >= 0 and z > 0")
    half = z / 2.0
    gamma = classical_euler_constant()

    def psi_int(m: int) -> float:
        return -gamma + math.fsum(1.0 / j for j in range(1, m))

    parts = [2.0 * classical_bessel_j(n, z) * math.log(half)]
    parts.extend(
        -math.factorial(n - k - 1) / math.factorial(k) * half ** (2 * k - n) for k in range(n)
    )
    k = 0
    while True:
        t = (-1) ** k * half ** (2 * k + n) / (math.factorial(k) * math.factorial(n + k))
        w = -t * (psi_int(k + 1) + psi_int(n + k + 1))
        parts.append(w)
        k += 1
        if abs(w) < 1e-16 * abs(neumaier_sum(parts)) and k > half + 2:
            break
    return neumaier_sum(parts) / math.pi


def finite_difference(f: Callable[[float], float], at: float, step: float = 1e-6) -> float:
    """Central difference (f(at+h) - f(at-h)) / 2h."""
    return (f(at + step) - f(at - step)) / (2.0 * step)


@dataclass(frozen=True)
class ResidueEstimate:
    value: float
    eps_sequence: tuple[float, ...]
    extrapolation_order: int

    def __post_init__(self):
        eps = self.eps_sequence
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps_sequence must be strictly decreasing")
        if min(eps) < 1e-7:
            raise ValueError("offsets below 1e-7 drown in rounding")


def _neville_at_zero(xs: Sequence[float], ys: Sequence[float]) -> float:
    p = list(ys)
    m = len(xs)
    for level in range(1, m):
        for i in range(m - level):
            j = i + level
            p[i] = (xs[j] * p[i] - xs[i] * p[i + 1]) / (xs[j] - xs[i])
    return p[0]


def extrapolate_limit(
    g: Callable[[float], float], at: float, eps_sequence: Sequence[float] = DEFAULT_EPS
) -> ResidueEstimate:
    """lim_{e -> 0} g(at + e) by symmetric sampling and Richardson extrapolation.

    The two-sided mean (g(at+e) + g(at-e))/2 is even in e, so the polynomial
    extrapolation runs in e**2.
    """
    eps = tuple(float(e) for e in eps_sequence)
    sym = [(g(at + e) + g(at - e)) / 2.0 for e in eps]
    value = _neville_at_zero([e * e for e in eps], sym)
    return ResidueEstimate(value, eps, 2 * len(eps))


def estimate_residue(
    f: Callable[[float], float], pole: float, eps_sequence: Sequence[float] = DEFAULT_EPS
) -> ResidueEstimate:
    """Residue of a simple pole: lim_{e -> 0} e * f(pole + e)."""
    return extrapolate_limit(lambda v: (v - pole) * f(v), pole, eps_sequence)


def direct_q_gamma(nu: float, q: float, factors: int = 500) -> float:
    """Gamma_q(nu) as a truncated product (1-q)^(1-nu) prod (1-q^l)/(1-q^(nu+l-1)).

    The log-factors are summed with :func:`neumaier_sum`.
    """
    logs = [(1.0 - nu) * math.log(1.0 - q)]
    sign = 1.0
    for l in range(1, factors + 1):
        num = 1.0 - q**l
        den = 1.0 - q ** (nu + l - 1)
        if den < 0:
            sign = -sign
        logs.append(math.log(num) - math.log(abs(den)))
    return sign * math.exp(neumaier_sum(logs))


def direct_q_psi(nu: float, q: float, terms: int = 200) -> float:
    """psi_q(nu) summed term by term, no tail correction."""
    lq = math.log(q)
    body = [lq * q ** (nu + l) / (1.0 - q ** (nu + l)) for l in range(terms)]
    return neumaier_sum([-math.log(1.0 - q)] + body)


def direct_j_series(nu: float, x: float, q: float, terms: int = 50) -> float:
    """Hahn-Exton J_nu(x; q) with every coefficient recomputed from direct_q_gamma."""
    out = []
    for k in range(terms):
        a = k + nu + 1
        if a <= 0 and a == round(a):
            continue
        out.append(
            (-1) ** k * q ** (k * (k + 1) / 2) * x ** (2 * k + nu) / (direct_q_gamma(k + 1, q) * direct_q_gamma(a, q))
        )
    return neumaier_sum(out)
