import math

import pytest

from qspecial import DivergenceError, Flag, PreconditionError, hahn_exton_j
from qspecial.params import DEFAULT_POLICY, QParam
from qspecial.verify import Window, product_lhs_J, product_lhs_N, product_rhs_J, product_rhs_N
from qspecial.verify.product import _bilateral

J_CASE = (1.2, 0.3, 0.7, 0.4, 0.5)


def test_product_j(relerr):
    lhs = product_lhs_J(*J_CASE)
    rhs = product_rhs_J(*J_CASE)
    assert relerr(lhs.value, rhs.value) < 1e-13
    # 200-digit value of both sides
    assert lhs.value == pytest.approx(0.56519619803662, rel=1e-13)
    assert lhs.est_error < 1e-12


@pytest.mark.parametrize("nu", [0.5, 1.0, 1.5, 0.0, -1.5])
def test_product_n(nu, relerr):
    assert relerr(product_lhs_N(nu, 0.3, 0.5).value, product_rhs_N(nu, 0.3, 0.5).value) < 1e-12


def test_window_enlargement_within_error():
    base = product_lhs_J(*J_CASE)
    wide = product_lhs_J(*J_CASE, window=Window(z_min=-80, z_max=200))
    assert abs(wide.value - base.value) <= base.est_error
    n = product_lhs_N(0.5, 0.3, 0.5)
    n_wide = product_lhs_N(0.5, 0.3, 0.5, window=Window(z_min=-80, z_max=200))
    assert abs(n_wide.value - n.value) <= n.est_error


def test_slow_base_still_agrees(relerr):
    case = (1.2, 0.3, 0.7, 0.4, 0.9)
    lhs = product_lhs_J(*case)
    rhs = product_rhs_J(*case)
    assert abs(lhs.value - rhs.value) <= lhs.est_error + rhs.est_error
    assert Flag.SLOW_CONVERGENCE in lhs.flags


def test_literal_normalization_fails():
    # With the (1-q)-scaled argument on every factor, both sides differ at O(1).
    # At q = 1/2 that scaling is a lattice shift by 2, so the literal LHS is
    # q**-2 times the Hahn-Exton one.
    x, y, nu, r, q = J_CASE
    literal_lhs = q**-2 * product_lhs_J(*J_CASE).value
    literal_rhs = (
        hahn_exton_j(0.0, r * q ** ((x + y) / 2), q).value * hahn_exton_j(nu, r * q ** ((nu + y) / 2), q).value
    )
    assert literal_lhs == pytest.approx(2.2608, abs=1e-4)
    assert literal_rhs == pytest.approx(0.4157, abs=1e-4)


@pytest.mark.parametrize(
    "args",
    [(1.2, 0.3, 0.7, 3.0, 0.5), (1.2, 0.3, 0.7, 0.0, 0.5), (1.2, 0.3, 0.7, -0.4, 0.5), (-1.2, 0.3, 0.7, 0.4, 0.5)],
)
def test_product_j_preconditions(args):
    with pytest.raises(PreconditionError):
        product_lhs_J(*args)


@pytest.mark.parametrize("nu,r", [(-2.0, 0.3), (2.0, 0.3), (2.5, 0.3), (0.5, 2.0), (0.5, 0.0)])
def test_product_n_preconditions(nu, r):
    with pytest.raises(PreconditionError):
        product_lhs_N(nu, r, 0.5)


def test_divergence_detected():
    q = QParam(0.5)
    with pytest.raises(DivergenceError):
        _bilateral(0.5, 0.5, lambda z: 1e300 if z < -5 else 1.0, q, Window(z_min=-5), DEFAULT_POLICY)


def test_window_validation():
    with pytest.raises(ValueError):
        Window(z_min=1, z_max=10)
    with pytest.raises(ValueError):
        Window(z_min=-10, z_max=0)
