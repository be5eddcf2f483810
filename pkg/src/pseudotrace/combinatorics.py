"""Binomial identities behind the trace-function recursions, checked in exact arithmetic."""

from fractions import Fraction
from functools import lru_cache
import random

from .scalar import ONE, Scalar
from .series import LaurentSeries, exp_kappa, expm1_power


@lru_cache(maxsize=200000)
def _binom(alpha, k):
    if k < 0:
        return Fraction(0)
    num = Fraction(1)
    for i in range(k):
        num *= alpha - i
    for i in range(2, k + 1):
        num /= i
    return num


def binom(alpha, k):
    """binom(alpha, k) = alpha(alpha-1)...(alpha-k+1)/k!, zero for k < 0."""
    if isinstance(alpha, Scalar):
        alpha = alpha.to_fraction()
    return _binom(Fraction(alpha), int(k))


def delta(a, b):
    return 1 if a == b else 0


def exp_kernel_sum(n, x_order, sign_flip=False):
    total = LaurentSeries.zero(hi=x_order)
    for k in range(n + 1):
        p = -n - k - 1
        sign = (-1) ** (n + k + 1)
        if sign_flip:
            sign = -sign
        reach = x_order - p
        bracket = exp_kappa(n + 1, reach) + exp_kappa(k, reach) * sign
        total = total + bracket * expm1_power(p, x_order) * binom(-n - 1, k)
    return total


def check_exp_kernel_sum(n, x_order=12, sign_flip=False):
    """sum_k binom(-n-1,k)(e^{(n+1)kx} + (-1)^{-n-k-1} e^{kkx})(e^{kx}-1)^{-n-k-1} == 1."""
    lhs = exp_kernel_sum(n, x_order, sign_flip)
    return lhs == LaurentSeries({0: ONE}, lo=lhs.lo, hi=x_order)


def weighted_vanishing_sum(m, n, k, l):
    return sum((Fraction(l, n - j + k) * binom(m, j) * binom(-l - 1, n - j + k - 1)
                for j in range(m + 1)), Fraction(0))


def check_weighted_vanishing(m, n, k, l):
    return weighted_vanishing_sum(m, n, k, l) == 0


def vandermonde(alpha, beta, m):
    """Returns (sum_j binom(alpha,j) binom(beta,m-j), binom(alpha+beta,m))."""
    lhs = sum((binom(alpha, j) * binom(beta, m - j) for j in range(m + 1)), Fraction(0))
    return lhs, binom(Fraction(alpha) + Fraction(beta), m)


def check_vandermonde(alpha, beta, m):
    lhs, rhs = vandermonde(alpha, beta, m)
    return lhs == rhs


def check_shifted_vandermonde(m, n, alpha):
    lhs = sum((binom(m, j) * binom(alpha, j + n) for j in range(m + 1)), Fraction(0))
    return lhs == binom(m + Fraction(alpha), m + n)


def double_delta_sum(m, n, l):
    total = Fraction(0)
    for k in range(n + 1):
        outer = binom(-2 * m + n - 1, k)
        if not outer:
            continue
        for j in range(m + 1):
            d = 2 * m - j - n + k
            total += outer * Fraction(l, d) * binom(m, j) * binom(l - 1, d - 1)
    return total


def check_double_delta(m, n, l):
    return double_delta_sum(m, n, l) == delta(l, m - n)


def andersen(alpha, m, k):
    if m < 1:
        raise ValueError("m must be positive")
    lhs = sum((binom(alpha, j) * binom(-Fraction(alpha), m - j) for j in range(k + 1)), Fraction(0))
    rhs = Fraction(m - k, m) * binom(Fraction(alpha) - 1, k) * binom(-Fraction(alpha), m - k)
    return lhs == rhs


def alternating_delta_sum(m, n, l):
    total = Fraction(0)
    for p in range(2 * n - m + 1):
        sign = (-1) ** (p + m)
        inner = sum((binom(-2 * n + m - 1, k) * binom(2 * n - m + 1, p + m + 1 - k)
                     for k in range(m + 1)), Fraction(0))
        total += sign * inner * binom(n + p + l, p + m)
    return total


def check_alternating_delta(m, n, l):
    return alternating_delta_sum(m, n, l) == delta(l, m - n)


def reciprocal_sum(m, n):
    s = sum((Fraction((-1) ** p) * binom(n, p) / (p + m + 1) for p in range(n + 1)), Fraction(0))
    return (n + 1 + m) * binom(n + m, m) * s


def check_reciprocal_sum(m, n):
    return reciprocal_sum(m, n) == 1


def paired_sums_first(n, l):
    """The two sums over j with binom(-l-1, .) and binom(l-1, .)."""
    first = sum((binom(n, j) * Fraction(l, n - j) * binom(-l - 1, n - j - 1) for j in range(n)),
                Fraction(0))
    second = sum((binom(n, j) * Fraction(l, n - j) * binom(l - 1, n - j - 1) for j in range(n)),
                 Fraction(0))
    return first, second


def check_paired_first(n, l):
    first, second = paired_sums_first(n, l)
    return first == 1 and second == binom(n + l, n) - 1


def paired_sums_second(n, l):
    first = second = Fraction(0)
    for mm in range(1, n + 1):
        c = binom(-n - 1, mm)
        for j in range(n + 1):
            d = n - j + mm
            w = c * binom(n, j) * Fraction(l, d)
            first += w * binom(-l - 1, d - 1)
            second += w * binom(l - 1, d - 1)
    return first, second


def check_paired_second(n, l):
    first, second = paired_sums_second(n, l)
    return first == 0 and second == -binom(n + l, n)


def random_rationals(count, rng):
    out = []
    while len(out) < count:
        a = Fraction(rng.randint(-60, 60), rng.randint(1, 12))
        if a.denominator != 1:
            out.append(a)
    return out


def binomial_grid(max_index=12, samples=20, seed=0):
    """Yield (identity id, params, callable) over the full precondition grid."""
    rng = random.Random(seed)
    alphas = random_rationals(samples, rng)
    betas = random_rationals(samples, rng)
    N = max_index
    for n in range(N + 1):
        yield "exp-kernel-sum", {"n": n, "x_order": N}, lambda n=n: check_exp_kernel_sum(n, N)
    for l in range(1, N + 1):
        for m in range(l, N + 1):
            for n in range(m, N + 1):
                for k in range(1, N + 1):
                    yield "weighted-vanishing", {"m": m, "n": n, "k": k, "l": l}, \
                        lambda a=(m, n, k, l): check_weighted_vanishing(*a)
    for i, (a, b) in enumerate(zip(alphas, betas)):
        for m in range(N + 1):
            yield "vandermonde", {"alpha": str(a), "beta": str(b), "m": m}, \
                lambda a=a, b=b, m=m: check_vandermonde(a, b, m)
        for m in range(N + 1):
            for n in range(N + 1):
                yield "shifted-vandermonde", {"m": m, "n": n, "alpha": str(a)}, \
                    lambda a=a, m=m, n=n: check_shifted_vandermonde(m, n, a)
        for m in range(1, N + 1):
            for k in range(m + 1):
                yield "partial-alternating", {"alpha": str(a), "m": m, "k": k}, \
                    lambda a=a, m=m, k=k: andersen(a, m, k)
    for m in range(1, N + 1):
        for n in range(m):
            for l in range(m + 1):
                yield "double-sum-delta", {"m": m, "n": n, "l": l}, lambda a=(m, n, l): check_double_delta(*a)
    for n in range(1, N + 1):
        for m in range(n + 1, min(2 * n, N + 1)):
            for l in range(1, n + 1):
                yield "alternating-delta", {"m": m, "n": n, "l": l}, lambda a=(m, n, l): check_alternating_delta(*a)
    for m in range(N + 1):
        for n in range(N + 1):
            yield "reciprocal-sum", {"m": m, "n": n}, lambda a=(m, n): check_reciprocal_sum(*a)
    for n in range(1, N + 1):
        for l in range(1, n + 1):
            yield "paired-sums-first", {"n": n, "l": l}, lambda a=(n, l): check_paired_first(*a)
            yield "paired-sums-second", {"n": n, "l": l}, lambda a=(n, l): check_paired_second(*a)


def verify_binomial_identities(max_index=12, samples=20, seed=0):
    """Run the sweep; returns a list of {id, params, status}."""
    results = []
    for ident, params, fn in binomial_grid(max_index, samples, seed):
        results.append({"id": ident, "params": params, "status": "PASS" if fn() else "FAIL"})
    return results
