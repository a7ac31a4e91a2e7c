import math

import pytest
from hypothesis import given, strategies as st

from qspecial import DomainError, Flag, bessel_solution, diff_eq_residual, hahn_exton_j, j_negative_int
from qspecial.oracle import direct_j_series
from qspecial.qbessel import j_lattice, j_limit_series

J_FROZEN = [
    (0.0, 0.7, 0.5, 0.76807442558117223),
    (1.0, 1.3, 0.5, 0.67816643365257037),
    (2.75, 2.0, 0.3, 1.2445241946313330),
    (0.5, 0.1, 0.9, 0.35234518576465406),
    (-0.5, 1.0, 0.5, 0.16016908289620141),
    (5.0, 3.0, 0.9, 0.42738589742675962),
]


@pytest.mark.parametrize("nu,x,q,expected", J_FROZEN)
def test_j_frozen(nu, x, q, expected, relerr):
    ev = hahn_exton_j(nu, x, q)
    assert relerr(ev.value, expected) < 1e-14
    assert abs(ev.value - expected) <= ev.est_error


def test_j_at_zero():
    assert hahn_exton_j(0.0, 0.0, 0.5).value == 1.0
    assert hahn_exton_j(2.5, 0.0, 0.5).value == 0.0
    with pytest.raises(DomainError):
        hahn_exton_j(-0.5, 0.0, 0.5)


def test_negative_x_rejected():
    with pytest.raises(DomainError):
        hahn_exton_j(1.0, -0.1, 0.5)


@given(st.floats(0.0, 6.0), st.floats(0.01, 3.0), st.floats(0.1, 0.9))
def test_against_coefficient_oracle(nu, x, q):
    ref = direct_j_series(nu, x, q, terms=60)
    assert hahn_exton_j(nu, x, q).value == pytest.approx(ref, rel=1e-11, abs=1e-14)


@given(st.floats(-1.9, 6.0), st.floats(0.01, 3.0), st.sampled_from([0.3, 0.5, 0.9]))
def test_difference_equation(nu, x, q):
    if nu < 0 and abs(nu - round(nu)) < 1e-3:
        return
    assert abs(diff_eq_residual(bessel_solution(nu, q), nu, x, q)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("q", [0.3, 0.5, 0.9])
def test_negative_integer_order(n, q, relerr):
    for x in (0.05, 0.5, 2.0):
        assert relerr(j_negative_int(n, x, q).value, j_limit_series(n, x, q).value) < 1e-13
        # the dispatcher routes exact negative integers the same way
        assert hahn_exton_j(-float(n), x, q).value == j_negative_int(n, x, q).value


def test_near_negative_integer_is_continuous():
    a = hahn_exton_j(-2.0 + 1e-6, 0.8, 0.5).value
    b = hahn_exton_j(-2.0, 0.8, 0.5).value
    assert abs(a - b) < 1e-4


def test_lattice_deep_values():
    # 200-digit references at z = -10 and z = -16 (q = 0.5)
    assert j_lattice(0.7, 0.5, -10, -10)[0][0] == pytest.approx(8.4816540659188938e-18, rel=1e-12)
    assert j_lattice(0.5, 0.5, -16, -16)[0][0] == pytest.approx(2.4843341442589566e-42, rel=1e-12)


def test_lattice_matches_series_where_series_is_safe():
    vals, err = j_lattice(1.5, 0.5, -3, 4)
    for z, v in zip(range(-3, 5), vals):
        assert v == pytest.approx(hahn_exton_j(1.5, 0.5 ** (z / 2) / 0.5, 0.5).value, rel=1e-11)
    assert err < 1e-12


def test_cancellation_flag_for_large_argument():
    ev = hahn_exton_j(0.0, 40.0, 0.9)
    assert Flag.CANCELLATION_RISK in ev.flags


def test_diff_eq_residual_domain():
    with pytest.raises(DomainError):
        diff_eq_residual(bessel_solution(0.0, 0.5), 0.0, 0.0, 0.5)
    assert diff_eq_residual(lambda x: 0.0, 1.0, 1.0, 0.5) == 0.0
