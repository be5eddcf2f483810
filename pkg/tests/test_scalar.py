from fractions import Fraction
import cmath
import math

import pytest

from pseudotrace.scalar import KAPPA, ONE, PI_SQUARED, ZERO, Scalar, close


def test_arithmetic_matches_complex_evaluation():
    a = Scalar.parse("1/2*k^2 + 3*k^-1 + -5*k^0")
    b = Scalar.parse("-2/3*k^1 + 7*k^0")
    k = 2j * math.pi
    for got, want in [(a + b, a.evaluate() + b.evaluate()),
                      (a * b, a.evaluate() * b.evaluate()),
                      (a - b, a.evaluate() - b.evaluate()),
                      (a ** 3, a.evaluate() ** 3)]:
        assert cmath.isclose(got.evaluate(), want, rel_tol=1e-12)
    assert cmath.isclose(KAPPA.evaluate(), k)


def test_pi_squared():
    assert cmath.isclose(PI_SQUARED.evaluate(), math.pi ** 2)


def test_parse_and_str_round_trip():
    for text in ["0", "1", "-3/4*k^-2", "1/12*k^2 + 2*k^0"]:
        s = Scalar.parse(text)
        assert Scalar.parse(str(s)) == s


def test_monomial_inverse():
    s = Scalar(Fraction(3, 5), 4)
    assert s * s.inverse() == ONE
    assert s / Scalar(Fraction(3, 5), 4) == ONE


def test_non_monomial_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        (ONE + KAPPA).inverse()
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_rational_predicates():
    assert Scalar(5).is_rational()
    assert Scalar(5).to_fraction() == 5
    assert not KAPPA.is_rational()
    with pytest.raises(ValueError):
        KAPPA.to_fraction()
    assert close(KAPPA * KAPPA, Scalar(1, 2))
