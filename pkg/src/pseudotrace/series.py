"""Truncated formal Laurent series with exact coefficients.

A series knows its coefficients on the window [lo, hi]. Everything below lo
is zero by construction; everything above hi is unknown and asking for it
raises WindowError. hi may be math.inf for polynomials and other exact data.

Coefficients are usually Scalars, but any value supporting +, unary -,
multiplication by a Scalar and truth testing works (modekit uses vectors).
"""

from fractions import Fraction
from functools import lru_cache
import math

from .errors import SubstitutionError, WindowError
from .scalar import ONE, ZERO, Scalar, as_scalar

INF = math.inf


def _acc(d, key, value):
    if not value:
        return
    old = d.get(key)
    new = value if old is None else old + value
    if new:
        d[key] = new
    else:
        d.pop(key, None)


class LaurentSeries:
    __slots__ = ("var", "lo", "hi", "coeffs")

    def __init__(self, coeffs=None, lo=None, hi=INF, var="x"):
        coeffs = {int(e): c for e, c in (coeffs or {}).items() if c}
        if lo is None:
            lo = min(coeffs) if coeffs else 0
        if hi != INF:
            hi = int(hi)
        self.var = var
        self.lo = int(lo)
        self.hi = hi
        self.coeffs = {e: c for e, c in coeffs.items() if e <= hi}
        if any(e < self.lo for e in self.coeffs):
            raise ValueError("coefficient below the declared lowest exponent")

    # -- constructors -----------------------------------------------------

    @classmethod
    def monomial(cls, coeff=ONE, exponent=0, hi=INF, var="x"):
        return cls({exponent: as_scalar(coeff) if isinstance(coeff, (int, Fraction)) else coeff},
                   lo=min(exponent, hi) if hi != INF else exponent, hi=hi, var=var)

    @classmethod
    def one(cls, var="x"):
        return cls({0: ONE}, lo=0, var=var)

    @classmethod
    def zero(cls, lo=0, hi=INF, var="x"):
        return cls({}, lo=lo, hi=hi, var=var)

    @classmethod
    def polynomial(cls, coeffs, var="x"):
        """Exact series from {exponent: coefficient}; ints and Fractions become Scalars."""
        conv = {e: as_scalar(c) if isinstance(c, (int, Fraction)) else c for e, c in coeffs.items()}
        return cls(conv, var=var)

    # -- access -----------------------------------------------------------

    def is_exact(self):
        return self.hi == INF

    def coeff(self, e):
        if e > self.hi:
            raise WindowError(f"x^{e} is beyond the known window [{self.lo}, {self.hi}]")
        return self.coeffs.get(e, ZERO)

    __getitem__ = coeff

    def residue(self):
        """Coefficient of var^-1."""
        return self.coeff(-1)

    def items(self):
        return sorted(self.coeffs.items())

    def valuation(self):
        return min(self.coeffs) if self.coeffs else None

    def is_zero(self):
        return not self.coeffs

    def truncate(self, hi):
        if hi > self.hi:
            raise WindowError(f"cannot extend window from {self.hi} to {hi}")
        return LaurentSeries({e: c for e, c in self.coeffs.items() if e <= hi},
                             lo=min(self.lo, hi + 1), hi=hi, var=self.var)

    def shift(self, k):
        """Multiply by var^k."""
        return LaurentSeries({e + k: c for e, c in self.coeffs.items()},
                             lo=self.lo + k, hi=self.hi + k, var=self.var)

    def map(self, f):
        return LaurentSeries({e: f(c) for e, c in self.coeffs.items()},
                             lo=self.lo, hi=self.hi, var=self.var)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.monomial(other, 0, var=self.var)
        out = dict(self.coeffs)
        hi = min(self.hi, other.hi)
        for e, c in other.coeffs.items():
            _acc(out, e, c)
        out = {e: c for e, c in out.items() if e <= hi}
        return LaurentSeries(out, lo=min(self.lo, other.lo, hi + 1), hi=hi, var=self.var)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({e: -c for e, c in self.coeffs.items()},
                             lo=self.lo, hi=self.hi, var=self.var)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            if not other:
                return LaurentSeries({}, lo=self.lo, hi=self.hi, var=self.var)
            return LaurentSeries({e: c * other for e, c in self.coeffs.items()},
                                 lo=self.lo, hi=self.hi, var=self.var)
        lo = self.lo + other.lo
        hi = min(self.lo + other.hi, self.hi + other.lo)
        out = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = ea + eb
                if e <= hi:
                    _acc(out, e, ca * cb)
        return LaurentSeries(out, lo=lo, hi=hi, var=self.var)

    def __rmul__(self, other):
        if isinstance(other, LaurentSeries):
            return other.__mul__(self)
        if not other:
            return LaurentSeries({}, lo=self.lo, hi=self.hi, var=self.var)
        return LaurentSeries({e: other * c for e, c in self.coeffs.items()},
                             lo=self.lo, hi=self.hi, var=self.var)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = LaurentSeries.one(self.var)
        for _ in range(n):
            result = result * self
        return result

    def inverse(self):
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("zero series")
        lead = as_scalar(self.coeffs[v])
        unit = self.shift(-v) * lead.inverse()
        inv = binom_pow(LaurentSeries(unit.coeffs, lo=0, hi=unit.hi, var=self.var), -1)
        return (inv * lead.inverse()).shift(-v)

    def derivative(self):
        return LaurentSeries({e - 1: c * e for e, c in self.coeffs.items() if e},
                             lo=self.lo - 1, hi=self.hi - 1, var=self.var)

    def equal_on(self, other, lo, hi):
        return all(self.coeff(e) == other.coeff(e) for e in range(lo, hi + 1))

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        hi = min(self.hi, other.hi)
        a = {e: c for e, c in self.coeffs.items() if e <= hi}
        b = {e: c for e, c in other.coeffs.items() if e <= hi}
        return a == b

    __hash__ = None

    def __repr__(self):
        terms = ", ".join(f"{e}: {c}" for e, c in self.items())
        return f"LaurentSeries({{{terms}}}, lo={self.lo}, hi={self.hi}, var={self.var!r})"

    # -- json -------------------------------------------------------------

    def to_json(self):
        return {
            "var": self.var,
            "lo": self.lo,
            "hi": None if self.hi == INF else self.hi,
            "coeffs": {str(e): str(c) for e, c in self.items()},
        }

    @classmethod
    def from_json(cls, data):
        hi = INF if data.get("hi") is None else data["hi"]
        coeffs = {int(e): Scalar.parse(c) for e, c in data["coeffs"].items()}
        return cls(coeffs, lo=data["lo"], hi=hi, var=data.get("var", "x"))


# -- power series with unit constant term ---------------------------------


def _power_coeffs(u, alpha, n_max):
    """Coefficients w_0..w_n_max of u**alpha, given u[0] == 1 (J.C.P. Miller recurrence)."""
    alpha = Fraction(alpha)
    w = [None] * (n_max + 1)
    w[0] = u[0] if len(u) else ONE
    for n in range(1, n_max + 1):
        total = None
        for k in range(1, min(n, len(u) - 1) + 1):
            if not u[k] or not w[n - k]:
                continue
            t = u[k] * w[n - k] * (alpha * k - n + k)
            total = t if total is None else total + t
        w[n] = ZERO if total is None else total * Fraction(1, n)
    return w


def binom_pow(base, alpha, order=None):
    """base**alpha = sum_m binom(alpha, m) (base - 1)**m for base with constant term 1."""
    if base.lo < 0 or base.coeff(0) != ONE:
        raise ValueError("binom_pow needs a power series with constant term 1")
    hi = base.hi if order is None else min(base.hi, order)
    alpha = Fraction(alpha)
    if hi == INF:
        if alpha.denominator == 1 and alpha >= 0:
            result = LaurentSeries.one(base.var)
            for _ in range(int(alpha)):
                result = result * base
            return result
        raise WindowError("an infinite expansion needs an explicit order")
    u = [base.coeff(e) for e in range(0, hi + 1)]
    w = _power_coeffs(u, alpha, hi)
    return LaurentSeries(dict(enumerate(w)), lo=0, hi=hi, var=base.var)


# -- standard expansions --------------------------------------------------


def exp_series(c, order, var="x"):
    """sum_{k<=order} c^k x^k / k!"""
    c = as_scalar(c)
    out = {}
    term = ONE
    for k in range(order + 1):
        if k:
            term = term * c * Fraction(1, k)
        out[k] = term
    return LaurentSeries(out, lo=0, hi=order, var=var)


@lru_cache(maxsize=None)
def _expm1_unit_power(p, n_max):
    # ((e^t - 1)/t)^p as rationals in t
    u = [Fraction(1, math.factorial(j + 1)) for j in range(n_max + 1)]
    w = [Fraction(1)] + [Fraction(0)] * n_max
    for n in range(1, n_max + 1):
        w[n] = sum((Fraction(p * k - n + k) * u[k] * w[n - k] for k in range(1, n + 1)),
                   Fraction(0)) / n
    return tuple(w)


def expm1_power(p, order, scale=1, var="x"):
    """(e^{s k x} - 1)^p for integer p, exact through x^order, where s = scale."""
    s = Fraction(scale)
    if not s:
        raise ValueError("scale must be nonzero")
    n_max = order - p
    if n_max < 0:
        return LaurentSeries({}, lo=p, hi=order, var=var)
    w = _expm1_unit_power(p, n_max)
    out = {}
    for j, c in enumerate(w):
        if c:
            # (s k x)^p * c_j (s k x)^j
            out[p + j] = Scalar(c * s ** (p + j), p + j)
    return LaurentSeries(out, lo=p, hi=order, var=var)


def expm1_inverse_power(m, order, var="x"):
    """(e^{kx} - 1)^{-m}, lowest term k^{-m} x^{-m}."""
    if m < 1:
        raise ValueError("m must be positive")
    return expm1_power(-m, order, var=var)


def exp_kappa(l, order, var="x"):
    """e^{l k x} through x^order, l rational."""
    l = Fraction(l)
    out = {}
    for j in range(order + 1):
        c = l ** j / math.factorial(j)
        if c:
            out[j] = Scalar(c, j)
    return LaurentSeries(out, lo=0, hi=order, var=var)


def log1p_series(order, scale=ONE, var="x"):
    """scale * log(1 + x) through x^order."""
    scale = as_scalar(scale)
    out = {n: scale * Fraction((-1) ** (n + 1), n) for n in range(1, order + 1)}
    return LaurentSeries(out, lo=1, hi=order, var=var)


def kappa_log1p(order, sign=1, var="x"):
    """sign * (1/k) log(1 + x)."""
    return log1p_series(order, Scalar(sign, -1), var=var)


# -- substitution ---------------------------------------------------------


def substitute(outer, inner, order=None):
    """outer(inner(x)) for inner = c x + (higher), c invertible when outer has poles."""
    if inner.lo < 1 and any(inner.coeff(e) for e in range(inner.lo, 1)):
        raise SubstitutionError("inner series must have zero constant term")
    lead = inner.coeff(1)
    negative = any(e < 0 for e in outer.coeffs)
    if negative and not (isinstance(lead, Scalar) and lead.is_unit()):
        raise SubstitutionError("inner series needs an invertible linear coefficient")
    if not lead:
        raise SubstitutionError("inner series must have valuation exactly 1")
    hi = min(outer.hi, outer.lo + inner.hi - 1)
    if order is not None:
        hi = min(hi, order)
    if hi == INF and negative:
        raise SubstitutionError("substitution with poles needs a finite order")
    var = inner.var
    if hi == INF:
        result = LaurentSeries({}, lo=0, var=var)
        for e, a in outer.items():
            result = result + (inner ** e) * a
        return result
    hi = int(hi)
    # inner = x * lead * v with v[0] = 1
    span = hi - outer.lo
    v = [inner.coeff(j + 1) / lead for j in range(0, span + 1)] if span >= 0 else []
    out = {}
    for e, a in outer.items():
        if e > hi:
            continue
        n_max = hi - e
        w = _power_coeffs(v, e, n_max) if n_max >= 0 else []
        lead_e = lead ** e
        for j, c in enumerate(w):
            if c:
                _acc(out, e + j, a * (c * lead_e))
    return LaurentSeries(out, lo=min(outer.lo, hi + 1), hi=hi, var=var)


def residue_pair(kernel, series):
    """Res of kernel * series, checking both windows reach far enough."""
    prod = kernel * series
    return prod.residue()


# -- q-series with logarithms ---------------------------------------------


def split_exponent(e):
    e = Fraction(e)
    n = math.floor(e)
    return e - n, n


class QLogSeries:
    """Finite sum over (r, k) of (log q)^k q^r * body(q), with r in [0, 1)."""

    __slots__ = ("blocks",)

    def __init__(self, blocks=None):
        self.blocks = {}
        for (r, k), body in (blocks or {}).items():
            r = Fraction(r)
            if not 0 <= r < 1 or k < 0:
                raise ValueError("blocks need 0 <= r < 1 and k >= 0")
            self.blocks[(r, k)] = body

    @classmethod
    def from_terms(cls, terms, q_order, k=0):
        """terms: {rational exponent: coefficient}; known through exponents < floor+q_order."""
        grouped = {}
        for e, c in terms.items():
            r, n = split_exponent(e)
            grouped.setdefault(r, {})[n] = as_scalar(c) if isinstance(c, (int, Fraction)) else c
        blocks = {}
        for r, body in grouped.items():
            blocks[(r, k)] = LaurentSeries(body, lo=min(body), hi=q_order, var="q")
        return cls(blocks)

    @classmethod
    def shifted(cls, offset, body, k=0):
        """q^offset * body with body a LaurentSeries in q."""
        r, n = split_exponent(offset)
        return cls({(r, k): body.shift(n)})

    def coefficient(self, exponent, k=0):
        r, n = split_exponent(exponent)
        body = self.blocks.get((r, k))
        if body is None:
            return ZERO
        return body.coeff(n)

    def max_log_power(self):
        return max((k for (_, k) in self.blocks), default=0)

    def q_hi(self):
        return min((r + b.hi for (r, _), b in self.blocks.items()), default=INF)

    def __add__(self, other):
        out = dict(self.blocks)
        for key, body in other.blocks.items():
            out[key] = out[key] + body if key in out else body
        return QLogSeries(out)

    def __neg__(self):
        return QLogSeries({key: -b for key, b in self.blocks.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QLogSeries):
            out = QLogSeries()
            for (r1, k1), b1 in self.blocks.items():
                for (r2, k2), b2 in other.blocks.items():
                    r, n = split_exponent(r1 + r2)
                    out = out + QLogSeries({(r, k1 + k2): (b1 * b2).shift(n)})
            return out
        if isinstance(other, LaurentSeries):
            return QLogSeries({key: b * other for key, b in self.blocks.items()})
        return QLogSeries({key: b * other for key, b in self.blocks.items()})

    __rmul__ = __mul__

    def truncate(self, hi):
        return QLogSeries({(r, k): b.truncate(math.floor(hi - r)) for (r, k), b in self.blocks.items()})

    def is_zero(self):
        return all(b.is_zero() for b in self.blocks.values())

    def terms(self):
        """Sorted list of (exponent, log power, coefficient)."""
        out = []
        for (r, k), body in self.blocks.items():
            for n, c in body.items():
                out.append((r + n, k, c))
        return sorted(out, key=lambda t: (t[0], t[1]))

    def __eq__(self, other):
        if not isinstance(other, QLogSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return "QLogSeries(" + ", ".join(f"(q^{e} log^{k}: {c})" for e, k, c in self.terms()) + ")"

    def to_json(self):
        return [{"r": str(r), "k": k, "body": b.to_json()} for (r, k), b in sorted(self.blocks.items())]


def qlog_qddq(s):
    """q d/dq applied termwise: (log q)^k q^a -> k (log q)^{k-1} q^a + a (log q)^k q^a."""
    out = QLogSeries()
    for (r, k), body in s.blocks.items():
        scaled = LaurentSeries({n: c * (r + n) for n, c in body.coeffs.items()},
                               lo=body.lo, hi=body.hi, var=body.var)
        out = out + QLogSeries({(r, k): scaled})
        if k:
            out = out + QLogSeries({(r, k - 1): body * k})
    return out
