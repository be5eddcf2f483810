"""Exact coefficients in Q[k, 1/k], where the symbol k stands for 2*pi*i.

A Scalar is a finite sum of terms c * k**e with rational c and integer e.
Keeping k formal means every identity that only involves powers of 2*pi*i
(and pi**2 = -k**2/4) can be decided by comparing coefficients.
"""

from fractions import Fraction
import cmath
import math
import re

TWO_PI_I = 2j * math.pi


def _as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    # numerators/denominators of gmpy2 or sympy rationals
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot make an exact rational from {value!r}")


class Scalar:
    """Immutable element of Q[k, 1/k] stored as {exponent: nonzero Fraction}."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, value=0, exponent=0):
        if isinstance(value, Scalar):
            self._terms = value._terms
        elif isinstance(value, dict):
            self._terms = {int(e): _as_fraction(c) for e, c in value.items() if c}
        else:
            c = _as_fraction(value)
            self._terms = {exponent: c} if c else {}
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        s = cls.__new__(cls)
        s._terms = terms
        s._hash = None
        return s

    @classmethod
    def kappa(cls, exponent=1, coeff=1):
        return cls(coeff, exponent)

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    # -- predicates -------------------------------------------------------

    def __bool__(self):
        return bool(self._terms)

    def is_rational(self):
        return not self._terms or set(self._terms) == {0}

    def is_monomial(self):
        return len(self._terms) == 1

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational number")
        return self._terms.get(0, Fraction(0))

    def degrees(self):
        return sorted(self._terms)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        out = dict(self._terms)
        for e, c in o._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Scalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Scalar._raw({})
            return Scalar._raw({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, Scalar):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return Scalar._raw({})
        if len(a) == 1 and len(b) == 1:
            (ea, ca), = a.items()
            (eb, cb), = b.items()
            return Scalar._raw({ea + eb: ca * cb})
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                out[e] = out.get(e, 0) + ca * cb
        return Scalar._raw({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def is_unit(self):
        return len(self._terms) == 1

    def inverse(self):
        if len(self._terms) != 1:
            raise ZeroDivisionError(f"{self} is not invertible in Q[k, 1/k]")
        (e, c), = self._terms.items()
        return Scalar._raw({-e: 1 / c})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, Scalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation and text ----------------------------------------------

    def evaluate(self):
        """Complex value with k replaced by 2*pi*i."""
        total = 0j
        for e, c in self._terms.items():
            total += float(c) * (2 * math.pi) ** e * (1j ** (e % 4))
        return complex(total)

    def __complex__(self):
        return self.evaluate()

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*k^{e}" for e, c in sorted(self._terms.items()))

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("", "0"):
            return cls()
        terms = {}
        for part in text.split(" + "):
            m = _TERM.fullmatch(part.strip())
            if m is None:
                raise ValueError(f"bad scalar term {part!r}")
            coeff = Fraction(m.group(1))
            e = int(m.group(2)) if m.group(2) is not None else 0
            terms[e] = terms.get(e, 0) + coeff
        return cls(terms)


_TERM = re.compile(r"(-?\d+(?:/\d+)?)(?:\*k\^(-?\d+))?")

ZERO = Scalar()
ONE = Scalar(1)
KAPPA = Scalar(1, 1)
PI_SQUARED = Scalar(Fraction(-1, 4), 2)


def as_scalar(value):
    if isinstance(value, Scalar):
        return value
    return Scalar(value)


def scalar_eval(a, precision_hint=None):
    """Numerical value of a with k = 2*pi*i (precision_hint is accepted but unused)."""
    return as_scalar(a).evaluate()


def scalar_add(a, b):
    return as_scalar(a) + as_scalar(b)


def scalar_mul(a, b):
    return as_scalar(a) * as_scalar(b)


def scalar_neg(a):
    return -as_scalar(a)


def close(a, b, rel=1e-12):
    return cmath.isclose(scalar_eval(a), scalar_eval(b), rel_tol=rel, abs_tol=rel)
