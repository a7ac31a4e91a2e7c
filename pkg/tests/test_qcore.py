import math

import pytest
from hypothesis import given, strategies as st

from qspecial import (
    DomainError,
    Flag,
    PoleError,
    QParam,
    TruncationPolicy,
    log_q_gamma,
    psi_over_gamma_limit,
    q_euler_constant,
    q_gamma,
    q_gamma_residue,
    q_psi,
    q_psi_residue,
    q_rgamma,
)
from qspecial.oracle import direct_q_gamma, direct_q_psi, estimate_residue
from qspecial.qcore import q_factorial, q_number

# 50-digit mpmath values from explicit products and sums
GAMMA_FROZEN = [
    (3.0, 0.5, 1.5),
    (0.5, 0.5, 1.5720327257863239),
    (2.75, 0.3, 1.2057270973510277),
    (-0.5, 0.9, -3.2133523796657313),
    (-1.5, 0.5, 0.51891905831556112),
    (7.25, 0.99, 1064.3760812332931),
]
PSI_FROZEN = [
    (1.0, 0.5, -0.42052903435604578),
    (0.5, 0.3, -1.4262631676229716),
    (2.75, 0.9, 0.75489026024381979),
    (-0.5, 0.5, 0.7280061468888215),
    (4.0, 0.99, 1.2436017454681828),
]

qs = st.floats(0.05, 0.95)
regular_nu = st.floats(0.05, 8.0)


@pytest.mark.parametrize("nu,q,expected", GAMMA_FROZEN)
def test_gamma_frozen(nu, q, expected, relerr):
    ev = q_gamma(nu, q)
    assert relerr(ev.value, expected) < 2e-14
    assert abs(ev.value - expected) <= ev.est_error


@pytest.mark.parametrize("nu,q,expected", PSI_FROZEN)
def test_psi_frozen(nu, q, expected):
    ev = q_psi(nu, q)
    assert abs(ev.value - expected) < 5e-15 * max(1.0, abs(expected))
    assert abs(ev.value - expected) <= ev.est_error


def test_gamma_at_integers_is_q_factorial():
    for n in range(8):
        assert q_gamma(n + 1.0, 0.5).value == pytest.approx(q_factorial(n, 0.5), rel=1e-14)
    assert q_gamma(3.0, 0.5).value == pytest.approx(1.5, rel=1e-15)


@given(regular_nu, qs)
def test_functional_equation(nu, q):
    lhs = q_gamma(nu + 1.0, q).value
    assert lhs == pytest.approx(q_number(nu, q) * q_gamma(nu, q).value, rel=1e-13)


@given(st.floats(-4.9, 6.0), qs)
def test_log_gamma_matches_product(nu, q):
    if abs(nu - round(nu)) < 1e-3 and nu < 0.5:
        return
    direct = direct_q_gamma(nu, q, factors=2000)
    assert math.exp(log_q_gamma(nu, q).value) == pytest.approx(abs(direct), rel=1e-12)
    assert math.copysign(1.0, q_gamma(nu, q).value) == math.copysign(1.0, direct)


@given(st.floats(0.05, 6.0), qs)
def test_psi_matches_plain_sum(nu, q):
    assert q_psi(nu, q).value == pytest.approx(direct_q_psi(nu, q, terms=2000), rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("pole", [0.0, -1.0, -2.0, -7.0])
def test_pole_raises(pole):
    with pytest.raises(PoleError, match=f"pole at nu={int(pole)}"):
        q_gamma(pole, 0.5)
    with pytest.raises(PoleError):
        q_psi(pole + 1e-10, 0.5)


def test_near_pole_flag():
    ev = q_gamma(-1.0 + 1e-6, 0.5)
    assert Flag.NEAR_POLE in ev.flags
    assert Flag.NEAR_POLE not in q_gamma(-1.5, 0.5).flags


def test_rgamma_vanishes_at_poles():
    for n in range(5):
        assert q_rgamma(-float(n), 0.7) == 0.0
    assert q_rgamma(2.5, 0.7) == pytest.approx(1.0 / q_gamma(2.5, 0.7).value, rel=1e-15)


def test_slow_convergence_flag():
    assert Flag.SLOW_CONVERGENCE in q_psi(1.0, 0.9995).flags
    assert Flag.SLOW_CONVERGENCE not in q_psi(1.0, 0.999).flags


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5, 0.99995, math.nan])
def test_invalid_q(bad):
    with pytest.raises(DomainError):
        QParam(bad)


def test_policy_validation():
    with pytest.raises(ValueError):
        TruncationPolicy(rel_tol=0.0)
    with pytest.raises(ValueError):
        TruncationPolicy(max_terms=0)


def test_euler_constant_is_minus_psi_one():
    for q in (0.3, 0.5, 0.9):
        assert q_euler_constant(q).value == -q_psi(1.0, q).value


@pytest.mark.parametrize("q", [0.5, 0.9])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_residues_against_extrapolation(n, q, relerr):
    g = estimate_residue(lambda v: q_gamma(v, q).value, -n).value
    assert relerr(g, q_gamma_residue(n, q)) < 1e-9
    p = estimate_residue(lambda v: q_psi(v, q).value, -n).value
    assert abs(p - q_psi_residue(n, q)) < 1e-9
    assert psi_over_gamma_limit(n, q) == pytest.approx(q_psi_residue(n, q) / q_gamma_residue(n, q), rel=1e-14)


def test_residue_exponent_sign():
    # the opposite exponent q**(-n(n+1)/2) is off by q**(n(n+1)) and must not match
    q, n = 0.5, 2
    est = estimate_residue(lambda v: q_gamma(v, q).value, -n).value
    wrong = q_gamma_residue(n, q) * q ** (-n * (n + 1))
    assert abs(est - wrong) > 0.5 * abs(wrong)


def test_deterministic():
    assert q_gamma(2.3, 0.7) == q_gamma(2.3, 0.7)
