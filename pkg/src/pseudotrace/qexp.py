"""Weierstrass kernels as exact double series in x and q = e^{k tau}.

Two presentations are built independently and compared:

* the exponential ("tilde") form, assembled from e^{kx}, (e^{kx} - 1)^{-m}
  and divisor sums in q;
* the Laurent form in x whose coefficients are Eisenstein series G_{2k}(q).

Every coefficient is a Scalar, so agreement is checked by equality.
"""

from fractions import Fraction
from functools import lru_cache
import cmath
import math

from sympy import bernoulli, divisor_sigma

from .errors import ConvergenceDomainError, WindowError
from .scalar import ONE, ZERO, Scalar
from .series import LaurentSeries, exp_kappa, expm1_power


def sigma(l):
    return sigma_k(l, 1)


def sigma_k(l, k):
    if l < 1:
        raise ValueError("divisor sums need l >= 1")
    return int(divisor_sigma(l, k))


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


class DoubleSeries:
    """Coefficients c[(i, s)] of x^i q^s, exact for x_lo <= i <= x_hi and 0 <= s <= q_order."""

    def __init__(self, coeffs, x_window, q_order):
        self.x_lo, self.x_hi = x_window
        self.q_order = q_order
        self.coeffs = {(i, s): c for (i, s), c in coeffs.items()
                       if c and self.x_lo <= i <= self.x_hi and 0 <= s <= q_order}

    @property
    def x_window(self):
        return (self.x_lo, self.x_hi)

    def coeff(self, i, s):
        if not (self.x_lo <= i <= self.x_hi and 0 <= s <= self.q_order):
            raise WindowError(f"x^{i} q^{s} outside the known rectangle")
        return self.coeffs.get((i, s), ZERO)

    def q_coefficient(self, s):
        """The x-series multiplying q^s."""
        return LaurentSeries({i: c for (i, t), c in self.coeffs.items() if t == s},
                             lo=self.x_lo, hi=self.x_hi)

    def x_coefficient(self, i):
        """The q-series multiplying x^i."""
        return LaurentSeries({s: c for (j, s), c in self.coeffs.items() if j == i},
                             lo=0, hi=self.q_order, var="q")

    def restrict(self, x_window, q_order):
        lo, hi = max(self.x_lo, x_window[0]), min(self.x_hi, x_window[1])
        return DoubleSeries(self.coeffs, (lo, hi), min(q_order, self.q_order))

    def __sub__(self, other):
        lo, hi = max(self.x_lo, other.x_lo), min(self.x_hi, other.x_hi)
        q = min(self.q_order, other.q_order)
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, ZERO) - c
        return DoubleSeries(out, (lo, hi), q)

    def __add__(self, other):
        return self - DoubleSeries({k: -c for k, c in other.coeffs.items()},
                                   other.x_window, other.q_order)

    def derivative_x(self):
        return DoubleSeries({(i - 1, s): c * i for (i, s), c in self.coeffs.items()},
                            (self.x_lo - 1, self.x_hi - 1), self.q_order)

    def nonzero(self):
        return sorted(self.coeffs.items())

    def is_zero(self):
        return not self.coeffs

    def to_json(self):
        return {
            "x_window": [self.x_lo, self.x_hi],
            "q_order": self.q_order,
            "coeffs": {f"{i},{s}": str(c) for (i, s), c in self.nonzero()},
        }


def _sym_exp_part(x_hi, q_order, parity):
    # sum_s sum_{l|s} w(l) (e^{lkx} + parity * e^{-lkx}) q^s, with w(l)=l for parity +1, 1 for -1
    out = {}
    for s in range(1, q_order + 1):
        for l in divisors(s):
            weight = l if parity == 1 else 1
            for j in range(0, x_hi + 1):
                sign = 1 + parity * (-1) ** j
                if sign:
                    c = Fraction(weight * sign * l ** j, math.factorial(j))
                    key = (j, s)
                    out[key] = out.get(key, ZERO) + Scalar(c, j)
    return out


def tilde_wp2(x_hi, q_order):
    """k^2 e^{kx}(e^{kx}-1)^{-2} + k^2 sum_s sum_{l|s} l(e^{lkx}+e^{-lkx}) q^s + k^2/12 - 2k^2 sum sigma(l) q^l."""
    if x_hi < -2:
        raise ValueError("x_hi must be at least -2")
    k2 = Scalar(1, 2)
    laurent = exp_kappa(1, x_hi + 2) * expm1_power(-2, x_hi)
    out = {(i, 0): c * k2 for i, c in laurent.items()}
    for key, c in _sym_exp_part(x_hi, q_order, 1).items():
        out[key] = out.get(key, ZERO) + c * k2
    out[(0, 0)] = out.get((0, 0), ZERO) + k2 * Fraction(1, 12)
    for l in range(1, q_order + 1):
        out[(0, l)] = out.get((0, l), ZERO) - k2 * (2 * sigma(l))
    return DoubleSeries(out, (-2, x_hi), q_order)


def tilde_wp1_minus_g2x(x_hi, q_order):
    """k e^{kx}(e^{kx}-1)^{-1} - k sum_s sum_{l|s} (e^{lkx}-e^{-lkx}) q^s - k/2."""
    if x_hi < -1:
        raise ValueError("x_hi must be at least -1")
    k = Scalar(1, 1)
    laurent = exp_kappa(1, x_hi + 1) * expm1_power(-1, x_hi)
    out = {(i, 0): c * k for i, c in laurent.items()}
    for key, c in _sym_exp_part(x_hi, q_order, -1).items():
        out[key] = out.get(key, ZERO) - c * k
    out[(0, 0)] = out.get((0, 0), ZERO) - k * Fraction(1, 2)
    return DoubleSeries(out, (-1, x_hi), q_order)


@lru_cache(maxsize=None)
def _eisenstein(two_k, q_order):
    if two_k < 2 or two_k % 2:
        raise ValueError("weight must be a positive even integer")
    b = bernoulli(two_k)
    const = -Fraction(int(b.p), int(b.q)) / math.factorial(two_k)
    coeffs = {0: Scalar(const, two_k)}
    factor = Fraction(2, math.factorial(two_k - 1))
    for n in range(1, q_order + 1):
        coeffs[n] = Scalar(factor * sigma_k(n, two_k - 1), two_k)
    return LaurentSeries(coeffs, lo=0, hi=q_order, var="q")


def eisenstein_qexp(two_k, q_order):
    """G_{2k} = 2 zeta(2k) + (2 k^{2k}/(2k-1)!) sum sigma_{2k-1}(n) q^n, with k = 2 pi i."""
    return _eisenstein(two_k, q_order)


class EisensteinTable:
    def __init__(self, q_order):
        self.q_order = q_order
        self.entries = {}

    def __getitem__(self, two_k):
        if two_k not in self.entries:
            self.entries[two_k] = eisenstein_qexp(two_k, self.q_order)
        return self.entries[two_k]


def _place(out, series, x_exp, factor):
    for s, c in series.items():
        key = (x_exp, s)
        out[key] = out.get(key, ZERO) + c * factor


def wp2_x_expansion(k_max, q_order, overrides=None):
    """x^{-2} + sum_{k=1}^{k_max} (2k+1) G_{2k+2} x^{2k}."""
    table = EisensteinTable(q_order)
    overrides = overrides or {}
    out = {}
    for s in range(0, q_order + 1):
        out[(-2, s)] = ONE if s == 0 else ZERO
    for k in range(1, k_max + 1):
        g = overrides.get(2 * k + 2, table[2 * k + 2])
        _place(out, g, 2 * k, 2 * k + 1)
    return DoubleSeries(out, (-2, 2 * k_max + 1), q_order)


def wp1_x_expansion(k_max, q_order, overrides=None):
    """x^{-1} - sum_{k=0}^{k_max} G_{2k+2} x^{2k+1}; the k=0 term is the -G_2 x correction."""
    table = EisensteinTable(q_order)
    overrides = overrides or {}
    out = {(-1, 0): ONE}
    for k in range(0, k_max + 1):
        g = overrides.get(2 * k + 2, table[2 * k + 2])
        _place(out, g, 2 * k + 1, -1)
    return DoubleSeries(out, (-1, 2 * k_max + 2), q_order)


def _discrepancy(a, b, x_window, q_order):
    diff = (a - b).restrict(x_window, q_order)
    return [{"x": i, "q": s, "diff": str(c)} for (i, s), c in diff.nonzero()]


def kernel_expansion_check(x_window=(-2, 8), q_order=8, x1_window=(-1, 9), overrides=None):
    """Compare both presentations of each kernel; every listed discrepancy must be empty."""
    lo2, hi2 = x_window
    lo1, hi1 = x1_window
    kmax2 = max(1, (hi2 + 1) // 2)
    kmax1 = max(0, (hi1 - 1) // 2)
    wp2 = wp2_x_expansion(kmax2, q_order, overrides)
    wp1 = wp1_x_expansion(kmax1, q_order, overrides)
    t2 = tilde_wp2(hi2, q_order)
    t1 = tilde_wp1_minus_g2x(hi1, q_order)
    d2 = _discrepancy(t2, wp2, (max(lo2, -2), hi2), q_order)
    d1 = _discrepancy(t1, wp1, (max(lo1, -1), hi1), q_order)
    return {
        "wp2": {"x_window": [max(lo2, -2), hi2], "q_order": q_order, "discrepancies": d2},
        "wp1": {"x_window": [max(lo1, -1), hi1], "q_order": q_order, "discrepancies": d1},
        "ok": not d1 and not d2,
    }


def derivative_relation_residual(x_hi, q_order):
    """wp2~ + d/dx(wp1~ - G2~ x) + G2~(q); zero on the common window."""
    t2 = tilde_wp2(x_hi, q_order)
    t1 = tilde_wp1_minus_g2x(x_hi + 1, q_order).derivative_x()
    g2 = eisenstein_qexp(2, q_order)
    g2_row = DoubleSeries({(0, s): c for s, c in g2.items()}, (-2, x_hi), q_order)
    return (t2 + t1 + g2_row).restrict((-2, x_hi), q_order)


def evaluate_q_series(series, q):
    total = 0j
    for n, c in series.items():
        total += c.evaluate() * q ** n
    return total


def modular_numeric_check(two_k, tau, q_order=40):
    """|G_{2k}(-1/tau) - tau^{2k} G_{2k}(tau)| from truncated q-series."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise ConvergenceDomainError("tau must lie in the upper half plane")
    q = cmath.exp(2j * math.pi * tau)
    tau2 = -1 / tau
    q2 = cmath.exp(2j * math.pi * tau2)
    if abs(q) >= 0.1:
        raise ConvergenceDomainError(f"|q| = {abs(q):.3g} is not below 0.1")
    if abs(q2) >= 0.5:
        raise ConvergenceDomainError(f"|q(-1/tau)| = {abs(q2):.3g} is not below 0.5")
    g = eisenstein_qexp(two_k, q_order)
    lhs = evaluate_q_series(g, q2)
    rhs = tau ** two_k * evaluate_q_series(g, q)
    return abs(lhs - rhs)
