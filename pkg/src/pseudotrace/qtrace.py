"""Shifted (pseudo-)q-traces at a weight cutoff and the identities they satisfy.

S(w) = sum_{k,n} S_{k,n}(w) (log q)^k q^{r+n}, with
S_{k,n}(w) = phi-pseudo-trace over W_[h0+n] of o(U(1)w) L(0)_N^k / k!,
where o(u) = u_{wt u - 1} and r = h0 - c/24.
"""

from fractions import Fraction
import math
import random

from . import _linalg as la
from ._report import report, summarize  # noqa: F401
from .algkit import RightModule, projectivity_and_basis, pseudo_trace
from .combinatorics import binom
from .errors import TruncationOverflow, WindowError
from .modekit import GradedVertexData, Vector, _coeff, u1
from .qexp import eisenstein_qexp, sigma, tilde_wp1_minus_g2x, tilde_wp2, wp1_x_expansion, wp2_x_expansion
from .scalar import ZERO, Scalar
from .series import LaurentSeries, QLogSeries, exp_kappa, expm1_power, qlog_qddq, split_exponent

KAPPA = Scalar(1, 1)
KAPPA2 = Scalar(1, 2)


class TraceContext:
    """Module data W, optionally with a right P-action and an SLF phi on P."""

    def __init__(self, V, P=None, phi=None, action=None, check=True):
        self.V = V
        self.P = P
        self.phi = phi
        self.action = action
        weights = V.weights
        self.h0 = min(weights) if weights else 0
        self.r = self.h0 - V.c / 24
        if (P is None) != (action is None) or (P is None) != (phi is None):
            raise ValueError("P, phi and action come together")
        self._blocks = {}
        self._nil = {}
        self.K = self._nilpotency()
        if check and action is not None:
            self._check_action()

    def grade_states(self, n):
        return self.V.states_of_weight(self.h0 + n)

    def max_grade(self):
        """Highest grade whose traces are known; closed data is complete."""
        if self.V.closed:
            return math.inf
        return self.V.D - self.h0

    def nilpotent_part(self, n):
        """Matrix of L(0) - (h0+n) on W_[h0+n] (columns = images of basis states)."""
        if n not in self._nil:
            states = self.grade_states(n)
            pos = {s: i for i, s in enumerate(states)}
            m = la.zeros(len(states), len(states))
            for j, s in enumerate(states):
                img = self.V.L(0, self.V.state(s))
                for t, c in img.c.items():
                    if t not in pos:
                        raise ValueError("L(0) does not preserve the grading")
                    m[pos[t]][j] = c.to_fraction()
                m[j][j] -= self.h0 + n
            self._nil[n] = m
        return self._nil[n]

    def _nilpotency(self):
        K = 0
        for n in range(max(self.V.weights, default=self.h0) - self.h0 + 1):
            m = self.nilpotent_part(n)
            power = m
            k = 0
            while any(any(row) for row in power):
                k += 1
                power = la.matmul(power, m)
                if k > len(m):
                    raise ValueError(f"L(0) - {self.h0 + n} is not nilpotent on its weight space")
            K = max(K, k)
        return K

    def _check_action(self):
        V = self.V
        for mat in self.action:
            for u in V.states_up_to(2):
                for j in range(V.dim):
                    for n in range(-1, V.weights[u] + V.weights[j]):
                        try:
                            col = V.mode_column(u, n, j)
                        except TruncationOverflow:
                            continue
                        # (u_n m).e == u_n (m.e) on the basis state j
                        left = [Fraction(0)] * V.dim
                        for r, f in col.items():
                            for t in range(V.dim):
                                left[t] += mat[t][r] * f
                        right = [Fraction(0)] * V.dim
                        for t in range(V.dim):
                            if mat[t][j]:
                                for r, f in V.mode_column(u, n, t).items():
                                    right[r] += f * mat[t][j]
                        if left != right:
                            raise ValueError("the right P-action does not commute with the modes")

    def module(self, n):
        if n not in self._blocks:
            states = self.grade_states(n)
            mats = [[[mat[a][b] for b in states] for a in states] for mat in self.action]
            M = RightModule(self.P, mats)
            self._blocks[n] = (M, projectivity_and_basis(M))
        return self._blocks[n]

    def trace(self, n, F):
        """(Pseudo-)trace of a Scalar matrix on W_[h0+n], taken kappa-degree by degree."""
        if self.P is None:
            return sum((F[i][i] for i in range(len(F))), ZERO)
        degrees = {e for row in F for c in row for e in c.degrees()}
        total = ZERO
        M, basis = self.module(n)
        for e in degrees:
            part = [[c.terms.get(e, Fraction(0)) if c else Fraction(0) for c in row] for row in F]
            total = total + Scalar(pseudo_trace(self.phi, M, part, basis), e)
        return total


class _TensorData(GradedVertexData):
    def __init__(self, unit_vector, **kw):
        super().__init__(**kw)
        self.unit_vector = unit_vector

    def one(self):
        return self.unit_vector


def tensor_module(V, P):
    """W = V (x) P where v (x) p acts by v_n (x) (left multiplication by p).

    P acts on the right of the second factor, which commutes with every mode.
    Returns (W, action) ready for TraceContext(W, P, phi, action)."""
    d = P.dim
    labels = [f"{V.labels[i]} (x) {P.names[a]}" for i in range(V.dim) for a in range(d)]
    weights = [V.weights[i] for i in range(V.dim) for _ in range(d)]

    def mode_fn(u, n, j):
        ui, ua = divmod(u, d)
        ji, ja = divmod(j, d)
        prod = P.mul[ua][ja]
        return {ri * d + b: f * c for ri, f in V.mode_column(ui, n, ji).items()
                for b, c in enumerate(prod) if c}

    def lift(vec):
        return Vector({i * d + a: c * u for i, c in vec.c.items() for a, u in enumerate(P.unit) if u})

    W = _TensorData(lift(V.one()), D=V.D, labels=labels, weights=weights,
                    vacuum=V.vacuum * d + next(a for a, u in enumerate(P.unit) if u),
                    omega=lift(V.omega), c=V.c, mode_fn=mode_fn, closed=V.closed, name=f"{V.name} (x) P")
    action = []
    for a in range(d):
        R = P.right_matrix(P.basis(a))
        m = la.zeros(W.dim, W.dim)
        for i in range(V.dim):
            for r in range(d):
                for s in range(d):
                    m[i * d + r][i * d + s] = R[r][s]
        action.append(m)
    return W, action


def zero_mode_matrix(V, u, states):
    """o(u) on span(states) as a Scalar matrix; u any Vector."""
    pos = {s: i for i, s in enumerate(states)}
    F = [[ZERO] * len(states) for _ in states]
    for j, s in enumerate(states):
        for i, c in u.c.items():
            for t, f in V.mode_column(i, V.weights[i] - 1, s).items():
                F[pos[t]][j] = F[pos[t]][j] + c * f
    return F


def _grade_values(ctx, i, n):
    """{k: S_{k,n}(e_i)}"""
    V = ctx.V
    states = ctx.grade_states(n)
    if not states:
        return {}
    u = u1(V, V.state(i))
    F = zero_mode_matrix(V, u, states)
    out = {}
    nil = ctx.nilpotent_part(n)
    power = la.identity(len(states))
    for k in range(ctx.K + 1):
        if k:
            power = [[x / k for x in row] for row in la.matmul(power, nil)]
        G = [[sum((F[a][b] * power[b][c] for b in range(len(states)) if power[b][c]), ZERO)
              for c in range(len(states))] for a in range(len(states))]
        val = ctx.trace(n, G)
        if val:
            out[k] = val
    return out


class OnePointMap:
    """A linear map w -> QLogSeries stored through its values on basis states."""

    def __init__(self, V, fn, r, q_order, K=0, name="S"):
        self.V = V
        self._fn = fn
        self.r = Fraction(r)
        self.q_order = q_order
        self.K = K
        self.name = name
        self._cache = {}

    def basis_value(self, i, n):
        key = (i, n)
        if key not in self._cache:
            if n > self.q_order:
                raise WindowError(f"grade {n} beyond q-order {self.q_order}")
            self._cache[key] = self._fn(i, n)
        return self._cache[key]

    def coefficient(self, w, n, k=0):
        """S_{k,n}(w)"""
        total = ZERO
        for i, c in w.c.items():
            v = self.basis_value(i, n).get(k)
            if v:
                total = total + c * v
        return total

    def components(self, w, q_order=None):
        top = self.q_order if q_order is None else q_order
        out = {}
        for n in range(top + 1):
            for k in range(self.K + 1):
                c = self.coefficient(w, n, k)
                if c:
                    out[(k, n)] = c
        return out

    def series(self, w, q_order=None):
        top = self.q_order if q_order is None else q_order
        return components_to_series(self.components(w, top), self.r, top, self.K)

    __call__ = series


def components_to_series(comps, r, q_order, K=0):
    r0, base = split_exponent(r)
    blocks = {}
    for k in range(K + 1):
        body = {base + n: c for (kk, n), c in comps.items() if kk == k}
        blocks[(r0, k)] = LaurentSeries(body, lo=base, hi=base + q_order, var="q")
    return QLogSeries(blocks)


def shifted_trace(ctx, q_order=None):
    """The one-point map w -> sum_n Tr_{W_[n]} o(U(1)w) q^{n - c/24} (pseudo-trace if P is set)."""
    top = ctx.max_grade()
    if q_order is None:
        if top == math.inf:
            raise ValueError("closed data needs an explicit q_order")
        q_order = top
    if q_order > top:
        raise TruncationOverflow(f"q-order {q_order} needs weights up to {ctx.h0 + q_order} > {ctx.V.D}")
    return OnePointMap(ctx.V, lambda i, n: _grade_values(ctx, i, n), ctx.r, q_order, ctx.K,
                       name="shifted_trace")


def random_map(V, q_order, seed=0, r=0):
    """A linear map with random rational values; almost never a conformal block."""
    rng = random.Random(seed)
    table = {(i, n): Fraction(rng.randint(-9, 9), rng.randint(1, 5))
             for i in range(V.dim) for n in range(q_order + 1)}
    return OnePointMap(V, lambda i, n: {0: Scalar(table[(i, n)])} if table[(i, n)] else {},
                       r, q_order, name="random")


# -- residues ----------------------------------------------------------------------


def weight_sum(V, v, w):
    hv = V.weight_of(v) or 0
    hw = V.weight_of(w) or 0
    return hv + hw


def exp_kernel(a, p, hi):
    """e^{a k x} (e^{kx} - 1)^{-p} through x^hi."""
    return exp_kappa(a, hi + p) * expm1_power(-p, hi)


def residue(V, kernel, v, w, sign=1):
    """Res_x kernel(x) Y(v, sign*x) w."""
    if not v or not w:
        return Vector()
    series = V.Y(v, w, hi=-1 - kernel.lo)
    if sign == -1:
        series = LaurentSeries({e: c * (-1) ** (e % 2) for e, c in series.coeffs.items()},
                               lo=series.lo, hi=series.hi)
    out = _coeff(kernel * series, -1)
    return out if isinstance(out, Vector) else Vector()


def _convolve(S, rows, q_order):
    """Components of sum_s q^s S(rows[s])."""
    out = {}
    for s, vec in rows.items():
        if not vec:
            continue
        for n in range(s, q_order + 1):
            for k in range(S.K + 1):
                c = S.coefficient(vec, n - s, k)
                if c:
                    out[(k, n)] = out.get((k, n), ZERO) + c
    return {key: c for key, c in out.items() if c}


# -- the three hypotheses ------------------------------------------------------------


def check_condition_vacuum(S, v, w, q_order=None):
    """S(v_0 w); zero for a conformal block."""
    top = S.q_order if q_order is None else q_order
    return S.series(S.V.apply_vec(v, 0, w), top)


def _x_reach(V, v, w):
    return max(weight_sum(V, v, w) - 1, 0)


def check_condition_wp2(S, v, w, q_order=None, perturbed=False):
    """sum_s q^s S(Res_x wp2~_s(x) Y(v,x) w); perturbed=True drops the sigma(l) q^l constant terms."""
    V = S.V
    top = S.q_order if q_order is None else q_order
    kernel = tilde_wp2(_x_reach(V, v, w), top)
    rows = {}
    for s in range(top + 1):
        row = kernel.q_coefficient(s)
        if perturbed and s:
            row = row + LaurentSeries({0: KAPPA2 * (2 * sigma(s))}, lo=row.lo, hi=row.hi)
        rows[s] = residue(V, row, v, w)
    return components_to_series(_convolve(S, rows, top), S.r, top, S.K)


def check_condition_derivative(S, w, q_order=None):
    """k^2 q d/dq S(w) - sum_s q^s S(Res_x (wp1~ - G2~ x)_s Y(omega,x) w)."""
    V = S.V
    top = S.q_order if q_order is None else q_order
    lhs = qlog_qddq(S.series(w, top)) * KAPPA2
    if not V.omega:
        return lhs
    kernel = tilde_wp1_minus_g2x(_x_reach(V, V.omega, w) + 1, top)
    rows = {s: residue(V, kernel.q_coefficient(s), V.omega, w) for s in range(top + 1)}
    return lhs - components_to_series(_convolve(S, rows, top), S.r, top, S.K)


def check_symmetry(S, v, w):
    """S_0(v <> w) - S_0(w <> v) for the N = 0 diamond product."""
    from .modekit import UMatrix, diamond
    V = S.V
    a = diamond(V, UMatrix.single(0, 0, 0, v), UMatrix.single(0, 0, 0, w), "tilde", "left")
    b = diamond(V, UMatrix.single(0, 0, 0, w), UMatrix.single(0, 0, 0, v), "tilde", "left")
    return S.coefficient(a.entries.get((0, 0), Vector()), 0) - S.coefficient(b.entries.get((0, 0), Vector()), 0)


# -- reports -----------------------------------------------------------------------------


def _label(V, vec):
    if len(vec.c) == 1:
        (i, c), = vec.c.items()
        if c == Scalar(1):
            return V.labels[i]
    return repr(vec)


def test_vectors(V, max_weight=2):
    return [V.state(i) for i in V.states_up_to(max_weight)]


def conformal_block_reports(S, vectors=None, q_order=None):
    V = S.V
    vectors = test_vectors(V) if vectors is None else vectors
    out = []
    for w in vectors:
        for v in vectors:
            idx = {"v": _label(V, v), "w": _label(V, w)}
            out.append(report("vacuum", idx, lambda v=v, w=w: check_condition_vacuum(S, v, w, q_order)))
            out.append(report("wp2", idx, lambda v=v, w=w: check_condition_wp2(S, v, w, q_order)))
        out.append(report("derivative", {"w": _label(V, w)},
                          lambda w=w: check_condition_derivative(S, w, q_order)))
    return out


# -- operator identities ------------------------------------------------------------------


def _qvec_diff(a, b):
    keys = set(a) | set(b)
    return {s: a.get(s, Vector()) - b.get(s, Vector()) for s in keys}


def _omega_identity(V, w, k_max, q_order):
    # (L(-2) - sum_{k>=0} G_{2k+2} L(2k)) w  vs  Res (wp1 - G2 x) Y(omega, x) w
    lhs = {0: V.L(-2, w)}
    for k in range(k_max + 1):
        lw = V.L(2 * k, w)
        if not lw:
            continue
        for s, g in eisenstein_qexp(2 * k + 2, q_order).items():
            lhs[s] = lhs.get(s, Vector()) - lw * g
    kernel = wp1_x_expansion(k_max, q_order)
    rhs = {s: residue(V, kernel.q_coefficient(s), V.omega, w) for s in range(q_order + 1)}
    return _qvec_diff(lhs, rhs)


def _wp2_identity(V, u, w, k_max, q_order):
    # (u_{-2} + sum_{k>=1} (2k+1) G_{2k+2} u_{2k}) w  vs  Res wp2 Y(u, x) w
    lhs = {0: V.apply_vec(u, -2, w)}
    for k in range(1, k_max + 1):
        uw = V.apply_vec(u, 2 * k, w)
        if not uw:
            continue
        for s, g in eisenstein_qexp(2 * k + 2, q_order).items():
            lhs[s] = lhs.get(s, Vector()) + uw * (g * (2 * k + 1))
    kernel = wp2_x_expansion(k_max, q_order)
    rhs = {s: residue(V, kernel.q_coefficient(s), u, w) for s in range(q_order + 1)}
    return _qvec_diff(lhs, rhs)


def verify_operator_identities(V, w, k_max=None, q_order=4, us=None):
    """Both Eisenstein-weighted mode identities for w, coefficient-wise in q."""
    us = test_vectors(V) if us is None else us
    out = []
    if V.omega:
        km = k_max if k_max is not None else (weight_sum(V, V.omega, w) + 1) // 2
        out.append(report("omega-residue", {"w": _label(V, w), "k_max": km, "q_order": q_order},
                          lambda: _omega_identity(V, w, km, q_order)))
    for u in us:
        km = k_max if k_max is not None else max(1, (weight_sum(V, u, w) + 1) // 2)
        out.append(report("wp2-residue", {"u": _label(V, u), "w": _label(V, w), "k_max": km,
                                          "q_order": q_order},
                          lambda u=u, km=km: _wp2_identity(V, u, w, km, q_order)))
    return out


# -- residue lemma ----------------------------------------------------------------------------


def binom_L(V, v, r, sign=1):
    """binom(sign L(-1)/k - 1, r) v"""
    inv_k = Scalar(sign, -1)
    out = v
    for i in range(r):
        out = V.L(-1, out) * inv_k - out * (1 + i)
    return out * Fraction(1, math.factorial(r))


def residue_lemma_sides(V, m, n, v, w, sign=1):
    if n < m:
        raise ValueError("needs n >= m")
    reach = _x_reach(V, v, w) + n
    lhs = residue(V, exp_kernel(m + 1, n + 2, reach), v, w, sign)
    base = exp_kernel(1, 2, reach)
    rhs = Vector()
    for j in range(m + 1):
        vj = binom_L(V, v, n - j, sign)
        rhs = rhs + residue(V, base, vj, w, sign) * (Fraction(1, n - j + 1) * binom(m, j))
    return lhs, rhs


def verify_residue_lemma(V, m, n, v, w, sign=1):
    idx = {"m": m, "n": n, "v": _label(V, v), "w": _label(V, w), "sign": sign}

    def run():
        lhs, rhs = residue_lemma_sides(V, m, n, v, w, sign)
        return lhs - rhs

    return report("residue-lemma", idx, run)


def residue_lemma_grid(V, max_n=3, vectors=None):
    vectors = test_vectors(V, 1) + ([V.omega] if V.omega else []) if vectors is None else vectors
    out = []
    for n in range(max_n + 1):
        for m in range(n + 1):
            for v in vectors:
                for w in vectors:
                    for sign in (1, -1):
                        out.append(verify_residue_lemma(V, m, n, v, w, sign))
    return out


# -- identities derived from the hypotheses --------------------------------------------------


def trace_vanishing(S, m, n, p, v, w, k=0):
    """S_{k,p}(Res e^{(m+1)kx}(e^{kx}-1)^{-n-2} Y(v,x) w)"""
    V = S.V
    u = residue(V, exp_kernel(m + 1, n + 2, _x_reach(V, v, w)), v, w)
    return S.coefficient(u, p, k)


def trace_exchange(S, m, n, v, w, k=0):
    """Left side minus right side of the m <-> n exchange identity."""
    V = S.V
    reach = _x_reach(V, v, w)
    lhs = ZERO
    for j in range(n + 1):
        c = binom(-2 * m + n - 1, j)
        if c:
            u = residue(V, exp_kernel(m + 1, 2 * m - n + j + 1, reach), v, w)
            lhs = lhs + S.coefficient(u, m, k) * c
    rhs = ZERO
    for j in range(m + 1):
        c = binom(-2 * n + m - 1, j)
        if c:
            u = residue(V, exp_kernel(n + 1, 2 * n - m + j + 1, reach), v, w, sign=-1)
            rhs = rhs + S.coefficient(u, n, k) * c
    return lhs - rhs


def trace_grading(S, n, w, k=0):
    """sum_m binom(-n-1,m) S_{k,n}(Res e^{(n+1)kx}(e^{kx}-1)^{-n-m-1} Y(omega,x)w)
    - k(r+n) S_{k,n}(w) - k(k+1) S_{k+1,n}(w)."""
    V = S.V
    reach = _x_reach(V, V.omega, w)
    total = ZERO
    for m in range(n + 1):
        u = residue(V, exp_kernel(n + 1, n + m + 1, reach), V.omega, w)
        total = total + S.coefficient(u, n, k) * binom(-n - 1, m)
    total = total - KAPPA * (S.r + n) * S.coefficient(w, n, k)
    if k + 1 <= S.K:
        total = total - KAPPA * (k + 1) * S.coefficient(w, n, k + 1)
    return total


def verify_derived_trace_identities(S, max_n=4, max_m4=2, max_grading=2, vectors=None):
    """Check the hypotheses on the test vectors, then the derived identities on their grids."""
    V = S.V
    vectors = test_vectors(V) if vectors is None else vectors
    out = conformal_block_reports(S, vectors)
    ks = range(S.K + 1)
    for n in range(max_n + 1):
        for m in range(n // 2 + 1):
            for p in range(m + 1):
                for v in vectors:
                    for w in vectors:
                        for k in ks:
                            idx = {"m": m, "n": n, "p": p, "k": k, "v": _label(V, v), "w": _label(V, w)}
                            out.append(report("trace-vanishing", idx,
                                              lambda a=(m, n, p, v, w, k): trace_vanishing(S, *a)))
    for m in range(max_m4 + 1):
        for n in range(max_m4 + 1):
            for v in vectors:
                for w in vectors:
                    for k in ks:
                        idx = {"m": m, "n": n, "k": k, "v": _label(V, v), "w": _label(V, w)}
                        out.append(report("trace-exchange", idx,
                                          lambda a=(m, n, v, w, k): trace_exchange(S, *a)))
    if V.omega:
        for n in range(max_grading + 1):
            for w in vectors:
                for k in ks:
                    idx = {"n": n, "k": k, "w": _label(V, w)}
                    out.append(report("trace-grading", idx, lambda a=(n, w, k): trace_grading(S, *a)))
    return out
