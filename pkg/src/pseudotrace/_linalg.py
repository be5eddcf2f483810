"""Exact rational linear algebra on lists of Fractions, backed by sympy's DomainMatrix."""

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _q(x):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def _f(x):
    return Fraction(int(x.numerator), int(x.denominator))


def to_dm(rows, ncols=None):
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[_q(x) for x in r] for r in rows], (len(rows), ncols), QQ)


def from_dm(m):
    return [[_f(x) for x in row] for row in m.to_list()]


def zeros(n, m):
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    bt = list(zip(*b)) if b else []
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def trace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def rref(rows, ncols=None):
    if not rows:
        return [], ()
    r, pivots = to_dm(rows, ncols).rref()
    return from_dm(r)[:len(pivots)], tuple(pivots)


def rank(rows, ncols=None):
    if not rows:
        return 0
    return to_dm(rows, ncols).rank()


def nullspace(rows, ncols):
    """Basis of {x : A x = 0}; A given as a list of rows with ncols columns."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = to_dm(rows, ncols).nullspace()
    return [r for r in from_dm(ns) if any(r)]


def row_basis(vectors, ncols):
    """A basis (in rref form) of the span of the given vectors."""
    basis, _ = rref(vectors, ncols) if vectors else ([], ())
    return basis


def solve(a_rows, b, ncols):
    """One solution x of A x = b, or None."""
    aug = [list(r) + [b[i]] for i, r in enumerate(a_rows)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def in_span(vectors, v):
    if not any(v):
        return True
    if not vectors:
        return False
    n = len(v)
    return rank(list(vectors) + [v], n) == rank(list(vectors), n)


def inverse(a):
    n = len(a)
    inv = to_dm(a, n).inv()
    return from_dm(inv)


def complement_basis(span_rows, ncols, order=None):
    """Indices of coordinate vectors completing span_rows to a basis, preferring later
    positions in `order` to be pivots of the span (so earlier ones survive as reps)."""
    order = list(range(ncols)) if order is None else list(order)
    # reverse the column order so the span pivots land on the *last* entries of order
    perm = list(reversed(order))
    permuted = [[r[c] for c in perm] for r in span_rows]
    _, pivots = rref(permuted, ncols) if permuted else ([], ())
    taken = {perm[p] for p in pivots}
    return [c for c in order if c not in taken]
