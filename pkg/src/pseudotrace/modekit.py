"""Truncated graded vertex algebras and the residue products built from their modes.

States are indexed by integers; every basis state is homogeneous. A mode u_n
applied to a state of weight h lands in weight wt(u) + h - n - 1. Data is
truncated at weight D: a mode whose target weight exceeds D is unknown and
raises TruncationOverflow, unless the data is `closed` (no states above D).

Vectors carry Scalar coefficients so that powers of 2*pi*i stay exact.
"""

from fractions import Fraction
from functools import lru_cache
import itertools
import json

from . import _linalg as la
from ._report import report
from .combinatorics import binom
from .errors import TruncationOverflow, WindowError
from .scalar import ONE, ZERO, Scalar, as_scalar
from .series import (LaurentSeries, binom_pow, exp_kappa, expm1_power, kappa_log1p,
                     log1p_series, substitute)


class Vector:
    """Finite linear combination of basis states with Scalar coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {}
        for i, v in (coeffs or {}).items():
            v = as_scalar(v) if not isinstance(v, Scalar) else v
            if v:
                self.c[i] = v

    @classmethod
    def basis(cls, i):
        return cls({i: ONE})

    @classmethod
    def _raw(cls, d):
        v = cls.__new__(cls)
        v.c = d
        return v

    def __bool__(self):
        return bool(self.c)

    def __add__(self, other):
        if not other:
            return self
        if not isinstance(other, Vector):
            return NotImplemented
        out = dict(self.c)
        for i, v in other.c.items():
            s = out.get(i)
            s = v if s is None else s + v
            if s:
                out[i] = s
            else:
                out.pop(i, None)
        return Vector._raw(out)

    def __radd__(self, other):
        if not other:
            return self
        return NotImplemented

    def __neg__(self):
        return Vector._raw({i: -v for i, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, Vector):
            return NotImplemented
        if not s:
            return Vector._raw({})
        out = {}
        for i, v in self.c.items():
            p = v * s
            if p:
                out[i] = p
        return Vector._raw(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Vector):
            return self.c == other.c
        if not other:
            return not self.c
        return NotImplemented

    __hash__ = None

    def items(self):
        return sorted(self.c.items())

    def __getitem__(self, i):
        return self.c.get(i, ZERO)

    def __repr__(self):
        return "Vector({" + ", ".join(f"{i}: {v}" for i, v in self.items()) + "})"


def vector_from_rational(coords):
    return Vector({i: Scalar(c) for i, c in enumerate(coords) if c})


# -- vertex data ------------------------------------------------------------------


class GradedVertexData:
    """Weights, vacuum, conformal vector and a mode oracle mode_fn(u, n, j) -> {row: Fraction}."""

    def __init__(self, D, labels, weights, vacuum, omega, c, mode_fn, closed=False, name="data"):
        self.D = D
        self.labels = list(labels)
        self.weights = list(weights)
        self.vacuum = vacuum
        self.omega = omega if isinstance(omega, Vector) else vector_from_rational(omega)
        self.c = Fraction(c)
        self._mode_fn = mode_fn
        self.closed = closed
        self.name = name
        self._cache = {}

    @property
    def dim(self):
        return len(self.weights)

    def states_of_weight(self, h):
        return [i for i, w in enumerate(self.weights) if w == h]

    def states_up_to(self, h):
        return [i for i, w in enumerate(self.weights) if w <= h]

    def dims(self):
        top = max(self.weights) if self.weights else 0
        return [len(self.states_of_weight(h)) for h in range(top + 1)]

    def one(self):
        return Vector.basis(self.vacuum)

    def state(self, i):
        return Vector.basis(i)

    # -- modes --

    def target_weight(self, u, n, j):
        return self.weights[u] + self.weights[j] - n - 1

    def mode_column(self, u, n, j):
        t = self.target_weight(u, n, j)
        if t < 0:
            return {}
        if t > self.D:
            if self.closed:
                return {}
            raise TruncationOverflow(
                f"mode {self.labels[u]}_{n} on {self.labels[j]} lands in weight {t} > {self.D}")
        key = (u, n, j)
        col = self._cache.get(key)
        if col is None:
            col = {r: f for r, f in self._mode_fn(u, n, j).items() if f}
            self._cache[key] = col
        return col

    def apply(self, u, n, vec):
        """u_n vec for a basis state u."""
        out = {}
        for j, cj in vec.c.items():
            for r, f in self.mode_column(u, n, j).items():
                s = out.get(r)
                t = cj * f
                s = t if s is None else s + t
                if s:
                    out[r] = s
                else:
                    out.pop(r, None)
        return Vector._raw(out)

    def apply_vec(self, uvec, n, vec):
        total = Vector()
        for u, cu in uvec.c.items():
            total = total + self.apply(u, n, vec) * cu
        return total

    def L(self, n, vec):
        return self.apply_vec(self.omega, n + 1, vec)

    def weight_of(self, vec):
        ws = {self.weights[i] for i in vec.c}
        return max(ws) if ws else None

    def components(self, vec):
        """Split into homogeneous pieces {weight: Vector}."""
        out = {}
        for i, v in vec.c.items():
            out.setdefault(self.weights[i], {})[i] = v
        return {h: Vector._raw(d) for h, d in out.items()}

    # -- vertex operator as a series --

    def Y(self, u, w, hi=None):
        """Y(u, x) w as a LaurentSeries with Vector coefficients, exact on its window."""
        if not u or not w:
            return LaurentSeries({}, lo=0, hi=hi if hi is not None else float("inf"))
        lo = None
        top = float("inf")
        for a in u.c:
            for b in w.c:
                s = self.weights[a] + self.weights[b]
                lo = -s if lo is None else min(lo, -s)
                if not self.closed:
                    top = min(top, self.D - s)
        if hi is not None:
            top = min(top, hi)
        if top == float("inf"):
            top = self.D - lo  # closed data: nothing above D, so this is all there is
            coeffs = self._y_coeffs(u, w, lo, top)
            return LaurentSeries(coeffs, lo=lo)
        coeffs = self._y_coeffs(u, w, lo, top)
        return LaurentSeries(coeffs, lo=min(lo, top + 1), hi=top)

    def _y_coeffs(self, u, w, lo, top):
        coeffs = {}
        for e in range(lo, int(top) + 1):
            v = self.apply_vec(u, -e - 1, w)
            if v:
                coeffs[e] = v
        return coeffs

    def to_json(self):
        modes = {}
        for u in range(self.dim):
            per = {}
            for n in range(-self.D - 1, 2 * self.D):
                mat = [[0] * self.dim for _ in range(self.dim)]
                any_entry = False
                for j in range(self.dim):
                    try:
                        col = self.mode_column(u, n, j)
                    except TruncationOverflow:
                        continue
                    for r, f in col.items():
                        mat[r][j] = str(f)
                        any_entry = True
                if any_entry:
                    per[str(n)] = mat
            modes[str(u)] = per
        return {
            "D": self.D,
            "dims": self.dims(),
            "labels": self.labels,
            "weights": self.weights,
            "modes": modes,
            "vacuum": self.vacuum,
            "omega": {str(i): str(v.to_fraction()) for i, v in self.omega.items()},
            "c": str(self.c),
            "closed": self.closed,
        }


def from_json(data, validate=True):
    """Load vertex data; mode entries not listed are zero within the cutoff."""
    if isinstance(data, str):
        data = json.loads(data)
    weights = data.get("weights")
    if weights is None:
        weights = [h for h, d in enumerate(data["dims"]) for _ in range(d)]
    labels = data.get("labels") or [f"s{i}" for i in range(len(weights))]
    table = {}
    for u, per in data["modes"].items():
        for n, mat in per.items():
            for r, row in enumerate(mat):
                for j, x in enumerate(row):
                    if x and Fraction(x):
                        table.setdefault((int(u), int(n), j), {})[r] = Fraction(x)

    def mode_fn(u, n, j):
        return table.get((u, n, j), {})

    omega = Vector({int(i): Scalar(Fraction(v)) for i, v in data["omega"].items()})
    V = GradedVertexData(data["D"], labels, weights, data["vacuum"], omega, Fraction(data["c"]),
                         mode_fn, closed=data.get("closed", False), name=data.get("name", "json"))
    if validate:
        problems = validate_data(V)
        if problems:
            raise ValueError("invalid vertex data: " + "; ".join(problems[:5]))
    return V


# -- built-in examples ----------------------------------------------------------------


def partitions(n, max_part=None):
    max_part = n if max_part is None else max_part
    if n == 0:
        return [()]
    out = []
    for k in range(min(n, max_part), 0, -1):
        for rest in partitions(n - k, k):
            out.append((k,) + rest)
    return out


def _add_part(lam, k):
    return tuple(sorted(lam + (k,), reverse=True))


def _alpha(p, state):
    """alpha_p on a Fock state given as {partition: Fraction}."""
    out = {}
    for lam, c in state.items():
        if p < 0:
            key = _add_part(lam, -p)
            out[key] = out.get(key, 0) + c
        elif p > 0:
            mult = lam.count(p)
            if mult:
                lst = list(lam)
                lst.remove(p)
                key = tuple(lst)
                out[key] = out.get(key, 0) + c * p * mult
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _fock_mode(lam, m, mu):
    """(alpha_{-lam_1} ... alpha_{-lam_k} 1)_m applied to the Fock state mu, as a tuple of items."""
    if not lam:
        return ((mu, Fraction(1)),) if m == -1 else ()
    n = lam[0]
    rest = lam[1:]
    wt_rest = sum(rest)
    wt_mu = sum(mu)
    out = {}
    # sum_{i>=0} binom(n+i-1, i) alpha_{-n-i} b_{m+i} + (-1)^{n+1} sum_i binom(n+i-1, i) b_{m-n-i} alpha_i
    i = 0
    while wt_rest + wt_mu - (m + i) - 1 >= 0:
        c = binom(n + i - 1, i)
        inner = dict(_fock_mode(rest, m + i, mu))
        for k, v in _alpha(-n - i, inner).items():
            out[k] = out.get(k, 0) + c * v
        i += 1
    sign = (-1) ** (n + 1)
    for i in range(1, wt_mu + 1):
        lowered = _alpha(i, {mu: Fraction(1)})
        if not lowered:
            continue
        c = binom(n + i - 1, i) * sign
        for nu, a in lowered.items():
            for k, v in _fock_mode(rest, m - n - i, nu):
                out[k] = out.get(k, 0) + c * a * v
    return tuple((k, v) for k, v in out.items() if v)


def heisenberg_data(D):
    """Rank-one Heisenberg vertex algebra (c = 1) truncated at weight D <= 6."""
    if D > 6:
        raise ValueError("heisenberg_data supports D <= 6")
    parts = [lam for h in range(D + 1) for lam in partitions(h)]
    index = {lam: i for i, lam in enumerate(parts)}
    labels = ["1" if not lam else " ".join(f"a(-{k})" for k in lam) + " 1" for lam in parts]
    weights = [sum(lam) for lam in parts]

    def mode_fn(u, n, j):
        return {index[k]: v for k, v in _fock_mode(parts[u], n, parts[j]) if k in index}

    omega = Vector({index[(1, 1)]: Scalar(Fraction(1, 2))}) if D >= 2 else Vector()
    return GradedVertexData(D, labels, weights, index[()], omega, 1, mode_fn, name=f"heisenberg({D})")


def trivial_data():
    def mode_fn(u, n, j):
        return {0: Fraction(1)} if n == -1 else {}

    return GradedVertexData(0, ["1"], [0], 0, Vector(), 0, mode_fn, closed=True, name="trivial")


def builtin(name, D=4):
    if name == "heisenberg":
        return heisenberg_data(D)
    if name == "trivial":
        return trivial_data()
    raise ValueError(f"unknown algebra {name!r}")


# -- invariants -------------------------------------------------------------------------


def _try(fn):
    try:
        return fn()
    except TruncationOverflow:
        return None


def validate_data(V, max_commutator_weight=None):
    """List of violated invariants (empty when the data is consistent)."""
    problems = []
    one = V.one()
    for j in range(V.dim):
        w = V.state(j)
        for n in range(-V.D - 2, V.D + 2):
            got = _try(lambda: V.apply(V.vacuum, n, w))
            if got is not None and got != (w if n == -1 else Vector()):
                problems.append(f"vacuum mode 1_{n} on {V.labels[j]}")
        if V.apply(j, -1, one) != w:
            problems.append(f"creation fails for {V.labels[j]}")
        for n in range(0, V.D + 1):
            if V.apply(j, n, one):
                problems.append(f"{V.labels[j]}_{n} 1 != 0")
        if V.omega:
            got = _try(lambda: V.L(0, w))
            if got is not None and got != w * V.weights[j]:
                problems.append(f"L(0) on {V.labels[j]}")
    if V.omega:
        top = V.D if max_commutator_weight is None else max_commutator_weight
        for u in range(V.dim):
            if V.weights[u] + 1 > V.D:
                continue
            Lu = V.L(-1, V.state(u))
            for j in range(V.dim):
                w = V.state(j)
                for n in range(-V.D - 1, V.D + 1):
                    lhs = _try(lambda: V.apply_vec(Lu, n, w))
                    rhs = _try(lambda: V.apply(u, n - 1, w) * (-n))
                    if lhs is not None and rhs is not None and lhs != rhs:
                        problems.append(f"L(-1) derivative for {V.labels[u]}_{n}")
        problems += _commutator_problems(V, top)
    return problems


def _commutator_problems(V, top):
    problems = []
    small = [i for i in range(V.dim) if V.weights[i] <= max(1, top // 2)]
    for u, v in itertools.product(small, small):
        for w in range(V.dim):
            ww = V.state(w)
            for m in range(-2, 3):
                for n in range(-2, 3):
                    def both():
                        lhs = V.apply(u, m, V.apply(v, n, ww)) - V.apply(v, n, V.apply(u, m, ww))
                        rhs = Vector()
                        for i in range(0, V.weights[u] + V.weights[v] + 1):
                            uiv = V.apply(u, i, V.state(v))
                            if uiv:
                                rhs = rhs + V.apply_vec(uiv, m + n - i, ww) * binom(m, i)
                        return lhs == rhs
                    ok = _try(both)
                    if ok is False:
                        problems.append(f"commutator [{V.labels[u]}_{m}, {V.labels[v]}_{n}]")
    return problems


# -- coefficients A_j and the operator U(1) ---------------------------------------------


def _apply_derivation(A, poly, top):
    """sum_j A_j y^{j+1} d/dy on a polynomial {deg: Scalar}, truncated at degree top."""
    out = {}
    for d, c in poly.items():
        if d == 0:
            continue
        for j, a in A.items():
            e = d + j
            if e <= top and a:
                out[e] = out.get(e, ZERO) + a * c * d
    return {e: c for e, c in out.items() if c}


def exp_derivation_y(A, top):
    """exp(sum_j A_j y^{j+1} d/dy) y through y^top."""
    term = {1: ONE}
    total = dict(term)
    k = 1
    while term:
        term = {e: c * Fraction(1, k) for e, c in _apply_derivation(A, term, top).items()}
        for e, c in term.items():
            total[e] = total.get(e, ZERO) + c
        k += 1
    return {e: c for e, c in total.items() if c}


def log_target(J):
    """(1/k) log(1 + k y) = sum_j (-k)^j y^{j+1} / (j+1)."""
    return {j + 1: Scalar(Fraction((-1) ** j, j + 1), j) for j in range(J + 1)}


def solve_A_coeffs(target, J):
    """A_1..A_J with exp(sum A_j y^{j+1} d/dy) y matching target through y^{J+1}."""
    A = {}
    for j in range(1, J + 1):
        current = exp_derivation_y(A, j + 1).get(j + 1, ZERO)
        A[j] = target.get(j + 1, ZERO) - current
    return [A[j] for j in range(1, J + 1)]


@lru_cache(maxsize=None)
def _A_cached(J):
    return tuple(solve_A_coeffs(log_target(J), J))


def compute_A_coeffs(J):
    if J > 12:
        raise ValueError("J must be at most 12")
    return list(_A_cached(J))


def A_residual(J):
    """exp(sum A_j ...) y - (1/k)log(1+ky) through y^{J+1}; all zero when solved."""
    A = dict(enumerate(compute_A_coeffs(J), start=1))
    got = exp_derivation_y(A, J + 1)
    target = log_target(J)
    return {e: got.get(e, ZERO) - target.get(e, ZERO) for e in range(1, J + 2)}


def _exp_lowering(V, vec, sign):
    """exp(sign * sum_j A_j L(j)) vec; terminates because L(j) lowers weight."""
    top = V.weight_of(vec) or 0
    A = compute_A_coeffs(max(1, top))
    total = vec
    term = vec
    k = 1
    while term:
        nxt = Vector()
        for j in range(1, top + 1):
            nxt = nxt + V.L(j, term) * (A[j - 1] * sign)
        term = nxt * Fraction(1, k)
        total = total + term
        k += 1
    return total


def kappa_L0(V, vec, power=1):
    return Vector({i: v * Scalar(1, power * V.weights[i]) for i, v in vec.c.items()})


def u1(V, vec):
    """U(1) = k^{L(0)} exp(-sum_j A_j L(j))."""
    if not V.omega:
        return kappa_L0(V, vec)
    return kappa_L0(V, _exp_lowering(V, vec, -1))


def u1_inverse(V, vec):
    if not V.omega:
        return kappa_L0(V, vec, -1)
    return _exp_lowering(V, kappa_L0(V, vec, -1), 1)


def u1_operator(V, upto_weight=None):
    """{state index: U(1) e_i} for states of weight <= upto_weight."""
    top = V.D if upto_weight is None else upto_weight
    return {i: u1(V, V.state(i)) for i in V.states_up_to(top)}


# -- hat coordinates -----------------------------------------------------------------


def total_degree(V, vec):
    """d with every term c k^a e_h satisfying a + h = d, or None when mixed."""
    degs = set()
    for i, v in vec.c.items():
        for a in v.degrees():
            degs.add(a + V.weights[i])
    if len(degs) > 1:
        return None
    return degs.pop() if degs else 0


def hat_coords(V, vec, states=None):
    """Rational coordinates in the basis k^{-h} e_h, after dividing out k^deg."""
    states = range(V.dim) if states is None else states
    d = total_degree(V, vec)
    if d is None:
        raise ValueError("vector is not homogeneous in the k-grading")
    out = []
    for i in states:
        v = vec[i]
        out.append(v.terms.get(d - V.weights[i], Fraction(0)) if v else Fraction(0))
    if any(i not in set(states) for i in vec.c):
        raise TruncationOverflow("vector has components outside the chosen states")
    return out


def plain_coords(V, vec, states=None):
    """Rational coordinates, after dividing out a common power of k."""
    states = range(V.dim) if states is None else states
    exps = {e for v in vec.c.values() for e in v.degrees()}
    if len(exps) > 1:
        raise ValueError("vector is not a power of k times a rational vector")
    if exps and exps != {0}:
        vec = vec * Scalar(1, -exps.pop())
    if any(i not in set(states) for i in vec.c):
        raise TruncationOverflow("vector has components outside the chosen states")
    return [vec[i].to_fraction() if vec[i] else Fraction(0) for i in states]


def coords(V, vec, flavor, states=None):
    return hat_coords(V, vec, states) if flavor == "tilde" else plain_coords(V, vec, states)


def from_coords(V, xs, flavor, states=None, degree=0):
    states = list(range(V.dim)) if states is None else list(states)
    if flavor == "tilde":
        return Vector({i: Scalar(x, degree - V.weights[i]) for i, x in zip(states, xs) if x})
    return Vector({i: Scalar(x) for i, x in zip(states, xs) if x})


# -- residue products ----------------------------------------------------------------------


def _coeff(series, e):
    try:
        return series.coeff(e)
    except WindowError as exc:
        raise TruncationOverflow(str(exc)) from None


def _poly_1px(a):
    """(1+x)^a as an exact series (a integer) or a truncated one later."""
    return LaurentSeries({k: Scalar(binom(a, k)) for k in range(0, a + 1)}, lo=0) if a >= 0 else None


def _one_plus_x_pow(a, hi):
    if a >= 0:
        return _poly_1px(a)
    return binom_pow(LaurentSeries({0: ONE, 1: ONE}, lo=0), a, hi)


def y_weighted(V, u, w, shift, hi):
    """Y((1+x)^{L(0)+shift} u, x) w through x^hi."""
    total = None
    for h, part in V.components(u).items():
        base = V.Y(part, w, hi=hi)
        series = base * _one_plus_x_pow(h + shift, hi - base.lo)
        total = series if total is None else total + series
    return total


def y_log(V, u, w, hi, sign=1):
    """Y(u, sign (1/k) log(1+x)) w through x^hi."""
    base = V.Y(u, w, hi=hi)
    order = hi - base.lo + 1
    return substitute(base, kappa_log1p(order, sign), order=hi)


def _check_window(series, top):
    if series.hi < top:
        raise TruncationOverflow(f"need x^{top} but the data only reaches x^{series.hi}")


def star_n(V, u, w, N):
    """u *_N w = sum_m (-1)^m binom(m+N, N) Res x^{-N-m-1} Y((1+x)^{L(0)+N} u, x) w."""
    top = 2 * N
    series = y_weighted(V, u, w, N, top)
    _check_window(series, top)
    out = Vector()
    for m in range(N + 1):
        out = out + _coeff(series, N + m) * binom(-N - 1, m)
    return out


def bullet_n(V, u, v, N):
    """u .(N) v = sum_m binom(-N-1, m) Res x^{-N-m-1} (1+x)^N Y(u, (1/k) log(1+x)) v."""
    top = 2 * N
    series = y_log(V, u, v, top) * _poly_1px(N)
    _check_window(series, top)
    out = Vector()
    for m in range(N + 1):
        out = out + _coeff(series, N + m) * binom(-N - 1, m)
    return out


def _apply_op_series(series, op, order):
    """Apply a linear operator to every coefficient."""
    return LaurentSeries({e: op(c) for e, c in series.coeffs.items()},
                         lo=series.lo, hi=series.hi, var=series.var)


def _exp_x_op(V, series, op, top):
    """sum_j x^j op^j(series) / j! through x^top."""
    total = series.truncate(top)
    term = series.truncate(top)
    j = 1
    while True:
        term = _apply_op_series(term.truncate(top - j), op, top) * Fraction(1, j)
        if term.is_zero():
            break
        total = total + term.shift(j)
        j += 1
    return total


def star_n_right(V, w, u, N):
    """w *_N u for W = V, using Y_{WV}^W(w, x) u = e^{x L(-1)} Y(u, -x) w."""
    top = 2 * N
    total = None
    for h, part in V.components(w).items():
        base = V.Y(u, part, hi=top)
        _check_window(base, top)
        neg = LaurentSeries({e: c * (-1) ** (e % 2) for e, c in base.coeffs.items()},
                            lo=base.lo, hi=base.hi)
        skew = _exp_x_op(V, neg, lambda c: V.L(-1, c), top)
        s = skew * _poly_1px(h + N)
        total = s if total is None else total + s
    # (1+x)^{-(L(-1)+L(0))} = exp(-log(1+x) (L(-1)+L(0)))
    T = lambda c: V.L(-1, c) + V.L(0, c)  # noqa: E731
    log_s = log1p_series(top - total.lo + 1, Scalar(-1))
    result = total.truncate(top)
    term = total.truncate(top)
    power = LaurentSeries.one()
    k = 1
    while True:
        power = power * log_s
        reach = top - power.lo
        if reach < term.lo:
            break
        term = _apply_op_series(term.truncate(reach), T, top)
        if term.is_zero():
            break
        contrib = (power * term) * Fraction(1, _fact(k))
        result = result + contrib.truncate(min(top, contrib.hi))
        k += 1
    _check_window(result, top)
    out = Vector()
    for m in range(N + 1):
        out = out + _coeff(result, N + m) * binom(-N - 1, m)
    return out


def _fact(k):
    f = 1
    for i in range(2, k + 1):
        f *= i
    return f


# -- U^N matrices and the two diamond products -------------------------------------------


class UMatrix:
    """Finitely supported matrix {(k, l): Vector} with indices in 0..N."""

    def __init__(self, N, entries=None):
        self.N = N
        self.entries = {}
        for (k, l), v in (entries or {}).items():
            if not (0 <= k <= N and 0 <= l <= N):
                raise ValueError("index out of range")
            if v:
                self.entries[(k, l)] = v

    @classmethod
    def single(cls, N, k, l, v):
        return cls(N, {(k, l): v})

    def __add__(self, other):
        out = dict(self.entries)
        for key, v in other.entries.items():
            out[key] = out[key] + v if key in out else v
        return UMatrix(max(self.N, other.N), out)

    def __neg__(self):
        return self.map(lambda v: -v)

    def __sub__(self, other):
        return self + (-other)

    def map(self, f):
        return UMatrix(self.N, {key: f(v) for key, v in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, UMatrix):
            return NotImplemented
        keys = set(self.entries) | set(other.entries)
        return all(self.entries.get(k, Vector()) == other.entries.get(k, Vector()) for k in keys)

    __hash__ = None

    def is_zero(self):
        return not self.entries

    def __repr__(self):
        return f"UMatrix(N={self.N}, {self.entries})"


def _diamond_entry(V, u, v, k, n, l, flavor, side):
    p0 = -k + n - l - 1
    top = k + l
    if side == "left":
        if flavor == "tilde":
            series = y_log(V, u, v, top) * _poly_1px(l)
        else:
            series = y_weighted(V, u, v, 0, top) * _poly_1px(l)
    else:
        # u is the module element w, v the algebra element
        if flavor == "tilde":
            series = y_log(V, v, u, top, sign=-1) * _poly_1px(k)
        else:
            series = _plain_right_series(V, v, u, top) * _poly_1px(k)
    _check_window(series, top)
    out = Vector()
    for m in range(n + 1):
        b = binom(p0, m)
        if b:
            out = out + _coeff(series, m - p0 - 1) * b
    return out


def _plain_right_series(V, v, w, top):
    """Y((1+x)^{-L(0)} v, -x(1+x)^{-1}) w through x^top."""
    inner = LaurentSeries({j: Scalar((-1) ** j) for j in range(1, top + 2 + 2 * V.D)}, lo=1,
                          hi=top + 1 + 2 * V.D)
    total = None
    for h, part in V.components(v).items():
        base = V.Y(part, w, hi=top)
        sub = substitute(base, inner, order=top)
        s = sub * _one_plus_x_pow(-h, top - sub.lo)
        total = s if total is None else total + s
    return total


def diamond(V, mu, mv, flavor="tilde", side="left"):
    """Product of U^N matrices: zero unless inner indices agree, otherwise the residue formula."""
    N = max(mu.N, mv.N)
    out = UMatrix(N)
    for (k, n), u in mu.entries.items():
        for (n2, l), v in mv.entries.items():
            if n != n2:
                continue
            val = Vector()
            for a, ca in u.c.items():
                for b, cb in v.c.items():
                    val = val + _diamond_entry(V, V.state(a), V.state(b), k, n, l, flavor, side) * (ca * cb)
            out = out + UMatrix(N, {(k, l): val})
    return out


def diamond_y_form(V, u, v, k, n, l):
    """Left tilde product via Res_y k e^{k(l+1)y}(e^{ky}-1)^{-k+n-l-m-1} Y(u,y)v."""
    base = V.Y(u, v, hi=k + l)
    _check_window(base, k + l)
    need = -1 - base.lo
    out = Vector()
    for m in range(n + 1):
        p = -k + n - l - m - 1
        b = binom(-k + n - l - 1, m)
        if not b or p > need:
            continue
        kernel = exp_kappa(l + 1, need - p) * expm1_power(p, need)
        out = out + _coeff(kernel * base, -1) * (Scalar(1, 1) * b)
    return out


# -- O-spans and quotients -------------------------------------------------------------------


def o_n_generators(V, N, weight_bound, flavor="plain"):
    """Spanning vectors of O_N (plain) or its tilde counterpart inside weights <= weight_bound."""
    B = min(weight_bound, V.D)
    gens = []
    states = range(V.dim)
    for u in states:
        for w in states:
            s = V.weights[u] + V.weights[w]
            p = 0
            while s + 2 * N + 1 + p <= B:
                e = 2 * N + 1 + p
                if flavor == "tilde":
                    series = y_log(V, V.state(u), V.state(w), e) * _poly_1px(N)
                else:
                    series = y_weighted(V, V.state(u), V.state(w), N, e)
                vec = _coeff(series, e)
                if vec:
                    gens.append(vec)
                p += 1
    if flavor == "tilde" and V.omega:
        for v in states:
            if V.weights[v] + 1 <= B:
                vec = V.L(-1, V.state(v))
                if vec:
                    gens.append(vec)
    return gens


def o_n_span(V, N, weight_bound, flavor="plain"):
    """Rational basis rows of the span (plain coordinates or hat coordinates)."""
    B = min(weight_bound, V.D)
    states = V.states_up_to(B)
    rows = [coords(V, g, flavor, states) for g in o_n_generators(V, N, B, flavor)]
    return la.row_basis(rows, len(states)) if rows else [], states


def in_o_span(V, vec, N, weight_bound, flavor="plain", span=None):
    span, states = o_n_span(V, N, weight_bound, flavor) if span is None else span
    return la.in_span(span, coords(V, vec, flavor, states))


class QuotientAlgebra:
    """Truncated V_{<=B} / O_N with products of representatives; None marks unvalidated entries."""

    def __init__(self, V, N, B, flavor, reps, states, span, table, closed):
        self.V = V
        self.N = N
        self.weight_bound = B
        self.flavor = flavor
        self.reps = reps
        self.states = states
        self.span = span
        self.table = table
        self.closed = closed

    @property
    def dim(self):
        return len(self.reps)

    def project(self, vec):
        """Coordinates of vec modulo the span in the representative basis."""
        x = coords(self.V, vec, self.flavor, self.states)
        cols = [[Fraction(int(s == r)) for s in self.states] for r in self.reps] + self.span
        sol = la.solve(la.transpose(cols), x, len(cols))
        return sol[:len(self.reps)]

    @property
    def algebra(self):
        from .algkit import FinDimAlgebra
        if not self.closed:
            raise TruncationOverflow("some products of representatives are not validated at this cutoff")
        unit = self.project(self.V.one())
        mul = [[self.table[i][j] for j in range(self.dim)] for i in range(self.dim)]
        return FinDimAlgebra(mul, unit, [self.V.labels[r] for r in self.reps])


def quotient_algebra(V, N, weight_bound, flavor="plain"):
    B = min(weight_bound, V.D)
    span, states = o_n_span(V, N, B, flavor)
    order = sorted(states, key=lambda i: (V.weights[i], i))
    pos = {s: k for k, s in enumerate(states)}
    keep = la.complement_basis(span, len(states), [pos[s] for s in order])
    reps = sorted((states[k] for k in keep), key=lambda i: (V.weights[i], i))
    q = QuotientAlgebra(V, N, B, flavor, reps, states, span, None, True)
    table = []
    closed = True
    for a in reps:
        row = []
        for b in reps:
            if V.weights[a] + V.weights[b] + 2 * N > B:
                row.append(None)
                closed = False
                continue
            prod = (bullet_n if flavor == "tilde" else star_n)(V, V.state(a), V.state(b), N)
            if flavor == "tilde":
                # hat basis: rescale reps so the structure constants are rational
                prod = prod * Scalar(1, -V.weights[a] - V.weights[b])
            row.append(q.project(prod))
        table.append(row)
    q.table = table
    q.closed = closed
    return q


def operator_residue(V, kernel, u, w):
    """Res_x kernel(x) Y(u, x) w for a scalar Laurent kernel."""
    series = V.Y(u, w, hi=-1 - kernel.lo)
    prod = kernel * series
    return _coeff(prod, -1)


# -- verification suites -----------------------------------------------------------------------


def _vertex_operator_conjugation(V, v, w):
    top = V.D - V.weights[v] - V.weights[w]
    vv, ww = V.state(v), V.state(w)
    lhs = y_log(V, vv, ww, top).map(lambda c: u1(V, c))
    rhs = y_weighted(V, u1(V, vv), u1(V, ww), 0, top)
    lo = -V.weights[v] - V.weights[w]
    return [lhs.coeff(e) - rhs.coeff(e) for e in range(lo, top + 1)]


def verify_u1_identities(V, max_weight=2, J=7):
    """U(1) on the vacuum and on omega, the A-coefficient residual, and U(1) Y(v, log(1+x)/k) U(1)^{-1}."""
    out = [report("u1-vacuum", {"algebra": V.name}, lambda: u1(V, V.one()) - V.one())]
    target = (V.omega - V.one() * (V.c / 24)) * Scalar(1, 2)
    out.append(report("u1-omega", {"algebra": V.name}, lambda: u1(V, V.omega) - target))
    out.append(report("A-coefficients", {"through": f"y^{J}"}, lambda: A_residual(J)))
    if V.closed:
        return out
    low = V.states_up_to(max_weight)
    for v in low:
        for w in low:
            out.append(report("u1-vertex-operator", {"v": V.labels[v], "w": V.labels[w]},
                              lambda v=v, w=w: _vertex_operator_conjugation(V, v, w)))
    return out


def verify_mode_algebra(V, max_weight=2, N_max=2, weight_bound=4):
    """Unit, centrality of omega modulo O_0, the U(1) intertwining of products, diamond conjugation."""
    out = []
    low = V.states_up_to(max_weight)
    one = V.one()
    B = min(weight_bound, V.D)
    span = o_n_span(V, 0, B, "plain")
    for v in low:
        vv = V.state(v)
        idx = {"v": V.labels[v]}
        out.append(report("unit-left", idx, lambda vv=vv: star_n(V, one, vv, 0) - vv))
        out.append(report("unit-right", idx, lambda vv=vv: star_n_right(V, vv, one, 0) - vv))
        if V.omega:
            out.append(report("omega-central", idx, lambda vv=vv: in_o_span(
                V, star_n(V, V.omega, vv, 0) - star_n_right(V, vv, V.omega, 0), 0, B, "plain", span)))
        for w in low:
            ww = V.state(w)
            out.append(report("u1-product", {"u": V.labels[v], "v": V.labels[w]},
                              lambda vv=vv, ww=ww: u1(V, bullet_n(V, vv, ww, 0))
                              - star_n(V, u1(V, vv), u1(V, ww), 0)))
    conj = lambda c: u1(V, c)  # noqa: E731
    for N in range(N_max + 1):
        for k in range(N + 1):
            for n in range(N + 1):
                for l in range(N + 1):
                    for a in low:
                        for b in low:
                            mu = UMatrix.single(N, k, n, V.state(a))
                            mv = UMatrix.single(N, n, l, V.state(b))
                            for side in ("left", "right"):
                                idx = {"N": N, "k": k, "n": n, "l": l, "u": V.labels[a],
                                       "v": V.labels[b], "side": side}
                                out.append(report("diamond-conjugation", idx, lambda mu=mu, mv=mv, side=side:
                                                  diamond(V, mu, mv, "tilde", side).map(conj)
                                                  - diamond(V, mu.map(conj), mv.map(conj), "plain", side)))
    return out
