from fractions import Fraction
import math
import random

import pytest
from sympy import binomial, Rational

from pseudotrace.combinatorics import (andersen, binomial_grid, alternating_delta_sum, reciprocal_sum, binom, check_exp_kernel_sum,
                                       check_weighted_vanishing, check_double_delta, check_alternating_delta, check_paired_first, check_paired_second, check_shifted_vandermonde,
                                       check_vandermonde, random_rationals, verify_binomial_identities)


def test_binom_agrees_with_integer_and_sympy():
    for n in range(12):
        for k in range(-2, 14):
            assert binom(n, k) == (math.comb(n, k) if k >= 0 else 0)
    for a in [Fraction(-7, 3), Fraction(5, 2), Fraction(-1)]:
        for k in range(8):
            want = binomial(Rational(a.numerator, a.denominator), k)
            assert binom(a, k) == Fraction(int(want.p), int(want.q))


def test_exponential_identity_and_its_sign_sensitivity():
    for n in range(6):
        assert check_exp_kernel_sum(n, 10)
    assert not check_exp_kernel_sum(2, 10, sign_flip=True)


def test_vanishing_sum():
    assert all(check_weighted_vanishing(m, n, k, l) for l in range(1, 5) for m in range(l, 6)
               for n in range(m, 7) for k in range(1, 6))


def test_vandermonde_and_shifted_form():
    rng = random.Random(3)
    for a, b in zip(random_rationals(5, rng), random_rationals(5, rng)):
        for m in range(8):
            assert check_vandermonde(a, b, m)
            assert check_shifted_vandermonde(m, 2, a)


def test_delta_identities():
    assert all(check_double_delta(m, n, l) for m in range(1, 8) for n in range(m) for l in range(m + 1))
    assert all(check_alternating_delta(m, n, l) for n in range(1, 7) for m in range(n + 1, 2 * n) for l in range(1, n + 1))


def test_reciprocal_sum_is_one():
    assert all(reciprocal_sum(m, n) == 1 for m in range(9) for n in range(9))


def test_paired_sums():
    assert all(check_paired_first(n, l) and check_paired_second(n, l) for n in range(1, 9) for l in range(1, n + 1))


def test_andersen_partial_sums():
    for a in [Fraction(1, 3), Fraction(-9, 4)]:
        assert all(andersen(a, m, k) for m in range(1, 8) for k in range(m + 1))
    with pytest.raises(ValueError):
        andersen(Fraction(1, 2), 0, 0)


def test_delta_identity_fails_outside_its_range():
    # l > n is not covered; the sum differs from delta(l, m - n) there
    assert alternating_delta_sum(3, 2, 3) != 0


def test_sweep_is_complete_and_clean():
    results = verify_binomial_identities(6, 4, seed=1)
    ids = {r["id"] for r in results}
    assert ids == {"exp-kernel-sum", "weighted-vanishing", "vandermonde", "shifted-vandermonde", "partial-alternating",
                   "double-sum-delta", "alternating-delta", "reciprocal-sum",
                   "paired-sums-first", "paired-sums-second"}
    assert all(r["status"] == "PASS" for r in results)


def test_grid_is_deterministic():
    a = [(i, p) for i, p, _ in binomial_grid(4, 3, seed=5)]
    b = [(i, p) for i, p, _ in binomial_grid(4, 3, seed=5)]
    assert a == b
