import cmath
from fractions import Fraction
import math

import mpmath
import pytest

from pseudotrace.errors import ConvergenceDomainError, WindowError
from pseudotrace.qexp import (derivative_relation_residual, eisenstein_qexp, evaluate_q_series,
                              kernel_expansion_check, modular_numeric_check, sigma, sigma_k, tilde_wp1_minus_g2x,
                              tilde_wp2, wp1_x_expansion, wp2_x_expansion)
from pseudotrace.scalar import Scalar


def _eval_double(ds, x, q):
    return sum(complex(c.evaluate()) * x ** i * q ** s for (i, s), c in ds.coeffs.items())


def _weierstrass_p(z, tau):
    # theta-function formula for the lattice Z + tau Z
    nome = mpmath.exp(1j * mpmath.pi * tau)
    t2, t3 = mpmath.jtheta(2, 0, nome), mpmath.jtheta(3, 0, nome)
    ratio = mpmath.jtheta(4, mpmath.pi * z, nome) / mpmath.jtheta(1, mpmath.pi * z, nome)
    return complex((mpmath.pi * t2 * t3 * ratio) ** 2 - mpmath.pi ** 2 / 3 * (t2 ** 4 + t3 ** 4))


def test_divisor_sums_brute_force():
    for n in range(1, 40):
        assert sigma(n) == sum(d for d in range(1, n + 1) if n % d == 0)
        assert sigma_k(n, 3) == sum(d ** 3 for d in range(1, n + 1) if n % d == 0)
    with pytest.raises(ValueError):
        sigma(0)


def test_g4_at_i_matches_lattice_value():
    q = cmath.exp(-2 * math.pi)
    got = evaluate_q_series(eisenstein_qexp(4, 20), q)
    want = float(mpmath.gamma(0.25) ** 8 / (960 * mpmath.pi ** 2))
    assert abs(got - want) < 1e-12


def test_eisenstein_normalization():
    g4 = eisenstein_qexp(4, 5)
    # 2 zeta(4) = pi^4/45 and the q-coefficients are 240 sigma_3(n) times that
    assert cmath.isclose(g4.coeff(0).evaluate(), math.pi ** 4 / 45)
    for n in range(1, 6):
        assert g4.coeff(n) == g4.coeff(0) * (240 * sigma_k(n, 3))
    assert eisenstein_qexp(2, 0).coeff(0) == Scalar(Fraction(-1, 12), 2)


def test_laurent_form_is_weierstrass_p():
    tau, x = 1j, 0.1
    q = cmath.exp(2j * math.pi * tau)
    ds = wp2_x_expansion(10, 12)
    assert abs(_eval_double(ds, x, q) - _weierstrass_p(x, tau)) < 1e-9


def test_exponential_form_is_weierstrass_p():
    tau, x = 1.2j, 0.05
    q = cmath.exp(2j * math.pi * tau)
    ds = tilde_wp2(30, 12)
    assert abs(_eval_double(ds, x, q) - _weierstrass_p(x, tau)) < 1e-8


def test_wp1_first_odd_coefficient_is_minus_g2():
    ds = wp1_x_expansion(2, 4)
    g2 = eisenstein_qexp(2, 4)
    for s in range(5):
        assert ds.coeff(1, s) == -g2.coeff(s)
    t = tilde_wp1_minus_g2x(3, 4)
    assert t.coeff(1, 0) == -g2.coeff(0)


def test_both_presentations_agree():
    res = kernel_expansion_check((-2, 8), 8, (-1, 9))
    assert res["ok"]
    assert res["wp2"]["discrepancies"] == [] and res["wp1"]["discrepancies"] == []


def test_perturbed_eisenstein_is_detected():
    g6 = eisenstein_qexp(6, 4)
    bad = g6 + g6.__class__({2: Scalar(1, 6)}, lo=0, hi=4, var="q")
    res = kernel_expansion_check((-2, 6), 4, (-1, 7), overrides={6: bad})
    assert not res["ok"]
    hits = {(d["x"], d["q"]) for d in res["wp2"]["discrepancies"]}
    assert hits == {(4, 2)}


def test_derivative_relation():
    assert derivative_relation_residual(7, 6).is_zero()


def test_window_is_enforced():
    ds = tilde_wp2(4, 3)
    with pytest.raises(WindowError):
        ds.coeff(5, 0)
    with pytest.raises(WindowError):
        ds.coeff(0, 4)


@pytest.mark.parametrize("tau", [2j, 1 + 2j])
@pytest.mark.parametrize("weight", [4, 6])
def test_modular_residuals(tau, weight):
    assert modular_numeric_check(weight, tau, 40) < 1e-6


def test_modularity_really_uses_the_weight():
    # the wrong power of tau gives an O(1) residual
    tau = 2j
    q = cmath.exp(2j * math.pi * tau)
    q2 = cmath.exp(2j * math.pi * (-1 / tau))
    g = eisenstein_qexp(4, 40)
    assert abs(evaluate_q_series(g, q2) - tau ** 2 * evaluate_q_series(g, q)) > 1


def test_convergence_domain():
    with pytest.raises(ConvergenceDomainError):
        modular_numeric_check(4, 0.2j, 40)
    with pytest.raises(ConvergenceDomainError):
        modular_numeric_check(4, -1j, 40)
