"""Finite-dimensional algebras over Q: radicals, idempotents, projective modules and pseudo-traces.

Conventions
-----------
Elements are coordinate lists of Fractions in a fixed basis e_0..e_{d-1}.
A right module M is given by matrices R_i with m . e_i = R_i m (column vectors),
so R(ab) = R(b) R(a). A bimodule adds left matrices L_i with e_i . m = L_i m.
"""

from fractions import Fraction
import random

from sympy import Poly, QQ, Symbol, factor_list

from . import _linalg as la
from .errors import IrreducibilityError, NotProjectiveError

_t = Symbol("t")


def _vec(x):
    return [Fraction(v) for v in x]


def _add(a, b):
    return [x + y for x, y in zip(a, b)]


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _scale(c, a):
    return [c * x for x in a]


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


class FinDimAlgebra:
    """Associative unital algebra given by structure constants mul[i][j] = coords of e_i e_j."""

    def __init__(self, mul, unit, names=None, check=True):
        self.dim = len(unit)
        self.mul = [[_vec(mul[i][j]) for j in range(self.dim)] for i in range(self.dim)]
        self.unit = _vec(unit)
        self.names = list(names) if names else [f"e{i}" for i in range(self.dim)]
        if check:
            self._validate()

    def _validate(self):
        d = self.dim
        for i in range(d):
            for j in range(d):
                if len(self.mul[i][j]) != d:
                    raise ValueError("structure constants have the wrong shape")
        for i in range(d):
            e = self.basis(i)
            if self.product(self.unit, e) != e or self.product(e, self.unit) != e:
                raise ValueError(f"unit law fails on {self.names[i]}")
            for j in range(d):
                for k in range(d):
                    left = self.product(self.mul[i][j], self.basis(k))
                    right = self.product(self.basis(i), self.mul[j][k])
                    if left != right:
                        raise ValueError(f"associativity fails on ({i},{j},{k})")

    def basis(self, i):
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def zero(self):
        return [Fraction(0)] * self.dim

    def product(self, a, b):
        out = [Fraction(0)] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.mul[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                for k, v in enumerate(row[j]):
                    if v:
                        out[k] += c * v
        return out

    def power(self, a, n):
        out = self.unit
        for _ in range(n):
            out = self.product(out, a)
        return out

    def left_matrix(self, a):
        """Matrix of b -> a b."""
        cols = [self.product(a, self.basis(j)) for j in range(self.dim)]
        return la.transpose(cols)

    def right_matrix(self, a):
        """Matrix of b -> b a."""
        cols = [self.product(self.basis(j), a) for j in range(self.dim)]
        return la.transpose(cols)

    def is_commutative(self):
        return all(self.mul[i][j] == self.mul[j][i]
                   for i in range(self.dim) for j in range(i + 1, self.dim))

    def to_json(self):
        return {"dim": self.dim, "unit": [str(x) for x in self.unit],
                "mul": [[[str(x) for x in v] for v in row] for row in self.mul],
                "names": self.names}

    @classmethod
    def from_json(cls, data):
        mul = [[[Fraction(x) for x in v] for v in row] for row in data["mul"]]
        return cls(mul, [Fraction(x) for x in data["unit"]], data.get("names"))

    def __repr__(self):
        return f"FinDimAlgebra(dim={self.dim}, names={self.names})"


# -- constructions ----------------------------------------------------------


def matrix_algebra(mats, names=None):
    """Algebra spanned by the given square matrices (which must be closed under product and contain 1)."""
    n = len(mats[0])
    flat = [[Fraction(x) for row in m for x in row] for m in mats]
    cols = la.transpose(flat)

    def coords(m):
        target = [Fraction(x) for row in m for x in row]
        sol = la.solve(cols, target, len(mats))
        if sol is None:
            raise ValueError("matrices are not closed under multiplication")
        return sol

    mul = [[coords(la.matmul(a, b)) for b in mats] for a in mats]
    unit = coords(la.identity(n))
    return FinDimAlgebra(mul, unit, names)


def direct_product(a, b):
    d = a.dim + b.dim
    mul = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for i in range(a.dim):
        for j in range(a.dim):
            mul[i][j][:a.dim] = a.mul[i][j]
    for i in range(b.dim):
        for j in range(b.dim):
            mul[a.dim + i][a.dim + j][a.dim:] = b.mul[i][j]
    names = [f"({n},0)" for n in a.names] + [f"(0,{n})" for n in b.names]
    return FinDimAlgebra(mul, a.unit + b.unit, names)


def subalgebra(A, vectors, unit):
    """Algebra on a basis of span(vectors) (closed under product) with the given unit.
    Returns (B, emb) where emb is the d x dim(B) embedding matrix."""
    basis = la.row_basis(vectors, A.dim)
    emb = la.transpose(basis)
    k = len(basis)

    def coords(v):
        sol = la.solve(emb, v, k)
        if sol is None:
            raise ValueError("span is not closed under multiplication")
        return sol

    mul = [[coords(A.product(basis[i], basis[j])) for j in range(k)] for i in range(k)]
    return FinDimAlgebra(mul, coords(unit), check=False), emb


def quotient_algebra(A, ideal):
    """A / ideal for a two-sided ideal given by spanning vectors.
    Returns (Q, proj, lift): proj maps A-coords to Q-coords, lift picks representatives."""
    ideal_basis = la.row_basis(ideal, A.dim) if ideal else []
    keep = la.complement_basis(ideal_basis, A.dim)
    k = len(keep)
    # proj: solve v = sum_c x_c e_keep[c] + sum_r y_r ideal_r
    cols = [A.basis(c) for c in keep] + ideal_basis
    m = la.transpose(cols)

    def proj_vec(v):
        sol = la.solve(m, v, len(cols))
        return sol[:k]

    proj = la.transpose([proj_vec(A.basis(i)) for i in range(A.dim)]) if k else []
    lift = la.transpose([A.basis(c) for c in keep]) if k else []
    mul = [[proj_vec(A.product(A.basis(keep[i]), A.basis(keep[j]))) for j in range(k)]
           for i in range(k)]
    Q = FinDimAlgebra(mul, proj_vec(A.unit), check=False) if k else None
    return Q, proj, lift


# -- radical, center, commutators ---------------------------------------------


def trace_form(A):
    Ls = [A.left_matrix(A.basis(i)) for i in range(A.dim)]
    return [[la.trace(la.matmul(Ls[i], Ls[j])) for j in range(A.dim)] for i in range(A.dim)]


def jacobson_radical(A):
    """Basis of J(A): the radical of (a, b) -> tr(L_a L_b), valid in characteristic zero."""
    return la.nullspace(trace_form(A), A.dim)


def center(A):
    rows = []
    for j in range(A.dim):
        for k in range(A.dim):
            rows.append([A.mul[i][j][k] - A.mul[j][i][k] for i in range(A.dim)])
    return la.nullspace(rows, A.dim)


def commutator_subspace(A):
    vecs = [_sub(A.mul[i][j], A.mul[j][i]) for i in range(A.dim) for j in range(i + 1, A.dim)]
    vecs = [v for v in vecs if any(v)]
    return la.row_basis(vecs, A.dim) if vecs else []


def same_class(A, a, b, comm=None):
    """a == b modulo [A, A]."""
    comm = commutator_subspace(A) if comm is None else comm
    return la.in_span(comm, _sub(a, b))


def slf_space(A):
    """Basis of symmetric linear functions (annihilator of [A,A])."""
    comm = commutator_subspace(A)
    return la.nullspace(comm, A.dim) if comm else [A.basis(i) for i in range(A.dim)]


def is_symmetric(A, phi):
    return all(_dot(phi, A.mul[i][j]) == _dot(phi, A.mul[j][i])
               for i in range(A.dim) for j in range(A.dim))


def slf_radical(A, phi):
    """Basis of rad phi = {a : phi(a b) = 0 for all b}."""
    gram = [[_dot(phi, A.mul[i][j]) for i in range(A.dim)] for j in range(A.dim)]
    return la.nullspace(gram, A.dim)


# -- idempotents ----------------------------------------------------------------


def minimal_polynomial(A, x):
    """Coefficients (low to high, monic) of the minimal polynomial of x."""
    powers = [A.unit]
    while True:
        nxt = A.product(powers[-1], x)
        sol = la.solve(la.transpose(powers), nxt, len(powers))
        if sol is not None:
            return [-c for c in sol] + [Fraction(1)]
        powers.append(nxt)


def _poly(coeffs):
    return Poly(list(reversed([QQ(c.numerator, c.denominator) for c in coeffs])), _t, domain=QQ)


def _coeffs(p):
    return [Fraction(int(c.numerator), int(c.denominator)) for c in reversed(p.all_coeffs())]


def eval_poly(A, coeffs, x):
    out = A.zero()
    for c in reversed(coeffs):
        out = _add(A.product(out, x), _scale(c, A.unit))
    return out


def _crt_idempotents(A, x):
    """Idempotents of Q[x] attached to the coprime prime-power factors of minpoly(x)."""
    m = _poly(minimal_polynomial(A, x))
    _, factors = factor_list(m.as_expr(), _t, domain=QQ)
    out = []
    for f, mult in factors:
        f = Poly(f, _t, domain=QQ)
        g = f ** mult
        h = m.exquo(g)
        u = (h * h.invert(g)).rem(m)
        out.append((eval_poly(A, _coeffs(u), x), f.degree()))
    return out


def newton_lift(A, x, max_steps=64):
    """Lift x (idempotent modulo a nilpotent ideal) to an idempotent via x <- 3x^2 - 2x^3."""
    for _ in range(max_steps):
        x2 = A.product(x, x)
        if x2 == x:
            return x
        x3 = A.product(x2, x)
        x = _sub(_scale(3, x2), _scale(2, x3))
    raise ValueError("idempotent lifting did not converge")


def _rank_of(A, vecs):
    vecs = [v for v in vecs if any(v)]
    return la.rank(vecs, A.dim) if vecs else 0


def central_idempotents(A, seed=0, allow_extension=False, tries=50):
    """Orthogonal primitive central idempotents summing to 1."""
    Z = center(A)
    J = jacobson_radical(A)
    Lz = []
    # nilpotent part of the center: z in Z with tr(L_{z b}) = 0 for all b
    form = trace_form(A)
    rows = [[_dot(la.matvec(form, z), A.basis(b)) for z in Z] for b in range(A.dim)]
    for c in la.nullspace(rows, len(Z)):
        v = A.zero()
        for ci, z in zip(c, Z):
            v = _add(v, _scale(ci, z))
        Lz.append(v)
    rng = random.Random(seed)
    for attempt in range(tries):
        if attempt == 0 and len(Z) == 1:
            x = Z[0]
        else:
            x = A.zero()
            for z in Z:
                x = _add(x, _scale(Fraction(rng.randint(-9, 9)), z))
        blocks = _crt_idempotents(A, x)
        ok = True
        for e, deg in blocks:
            ez = _rank_of(A, [A.product(e, z) for z in Z])
            ej = _rank_of(A, [A.product(e, j) for j in Lz])
            if ez - ej != deg:
                ok = False
                break
        if ok:
            if any(deg > 1 for _, deg in blocks) and not allow_extension:
                raise IrreducibilityError("a central block is a proper field extension of Q")
            return [e for e, _ in blocks]
    raise IrreducibilityError("could not separate the central blocks")


def _candidates(A, rng, count):
    d = A.dim
    for i in range(d):
        yield A.basis(i)
    for i in range(d):
        for j in range(i + 1, d):
            yield _add(A.basis(i), A.basis(j))
    for _ in range(count):
        yield [Fraction(rng.choice([-1, 0, 0, 1, 2])) for _ in range(d)]


def primitive_idempotent_semisimple(S, seed=0, tries=200):
    """A primitive idempotent of a split simple algebra S (unit of S is 1).

    Splits by searching small elements whose minimal polynomial factors over Q;
    raises IrreducibilityError when no splitting element turns up."""
    rng = random.Random(seed)
    e = S.unit
    while True:
        corner = [S.product(S.product(e, S.basis(i)), e) for i in range(S.dim)]
        if _rank_of(S, corner) <= 1:
            return e
        B, emb = subalgebra(S, corner, e)
        found = None
        for x in _candidates(B, rng, tries):
            parts = _crt_idempotents(B, x)
            if len(parts) < 2:
                continue
            best = min(parts, key=lambda p: _rank_of(B, [B.product(B.product(p[0], B.basis(i)), p[0])
                                                        for i in range(B.dim)]))
            found = la.matvec(emb, best[0])
            break
        if found is None:
            raise IrreducibilityError("no splitting element found; block may be a division algebra")
        e = found


def basic_idempotent(A, seed=0):
    """Idempotent f of A with fAf basic: one lifted primitive idempotent per simple block of A/J."""
    J = jacobson_radical(A)
    S, proj, lift = quotient_algebra(A, J)
    f_bar = S.zero()
    for c in central_idempotents(S, seed=seed):
        block, emb = subalgebra(S, [S.product(c, S.basis(i)) for i in range(S.dim)], c)
        p = primitive_idempotent_semisimple(block, seed=seed)
        f_bar = _add(f_bar, la.matvec(emb, p))
    return newton_lift(A, la.matvec(lift, f_bar))


# -- modules --------------------------------------------------------------------


class RightModule:
    """Right A-module with m . e_i = mats[i] m."""

    def __init__(self, A, mats, check=True):
        self.A = A
        self.mats = [[_vec(r) for r in m] for m in mats]
        self.dim = len(self.mats[0]) if self.mats else 0
        if check:
            self._validate()

    def _validate(self):
        A = self.A
        n = self.dim
        unit = self.action_matrix(A.unit)
        if unit != la.identity(n):
            raise ValueError("unit does not act as the identity")
        for i in range(A.dim):
            for j in range(A.dim):
                lhs = la.matmul(self.mats[j], self.mats[i])
                if lhs != self.action_matrix(A.mul[i][j]):
                    raise ValueError("right action is not compatible with the product")

    def action_matrix(self, a):
        out = la.zeros(self.dim, self.dim)
        for c, m in zip(a, self.mats):
            if c:
                for r in range(self.dim):
                    for s in range(self.dim):
                        out[r][s] += c * m[r][s]
        return out

    def act(self, m, a):
        return la.matvec(self.action_matrix(a), m)

    def basis(self, i):
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def submodule(self, vectors):
        """Submodule spanned by vectors . A, with its inclusion matrix."""
        span = la.row_basis([self.act(v, self.A.basis(i)) for v in vectors
                             for i in range(self.A.dim)], self.dim)
        inc = la.transpose(span)
        k = len(span)
        mats = []
        for R in self.mats:
            cols = [la.solve(inc, la.matvec(R, s), k) for s in span]
            mats.append(la.transpose(cols))
        return RightModule(self.A, mats, check=False), inc


def free_module(A, n=1):
    blocks = [A.right_matrix(A.basis(i)) for i in range(A.dim)]
    d = A.dim
    mats = []
    for R in blocks:
        M = la.zeros(n * d, n * d)
        for b in range(n):
            for r in range(d):
                for s in range(d):
                    M[b * d + r][b * d + s] = R[r][s]
        mats.append(M)
    return RightModule(A, mats, check=False)


def ideal_module(A, e):
    """The right ideal eA."""
    return free_module(A).submodule([e])[0]


class Bimodule:
    """A-bimodule with e_i . m = left[i] m and m . e_i = right[i] m."""

    def __init__(self, A, left, right, check=True):
        self.A = A
        self.left = [[_vec(r) for r in m] for m in left]
        self.right = [[_vec(r) for r in m] for m in right]
        self.dim = len(self.left[0]) if self.left else 0
        if check:
            self._validate()

    def _validate(self):
        A = self.A
        RightModule(A, self.right)
        for i in range(A.dim):
            for j in range(A.dim):
                lhs = la.matmul(self.left[i], self.left[j])
                if lhs != _combine(self.left, A.mul[i][j], self.dim):
                    raise ValueError("left action is not compatible with the product")
                if la.matmul(self.left[i], self.right[j]) != la.matmul(self.right[j], self.left[i]):
                    raise ValueError("left and right actions do not commute")
        if _combine(self.left, A.unit, self.dim) != la.identity(self.dim):
            raise ValueError("unit does not act as the identity on the left")

    def is_symmetric(self, phi):
        for i in range(self.A.dim):
            for k in range(self.dim):
                m = [Fraction(int(k == r)) for r in range(self.dim)]
                if _dot(phi, la.matvec(self.left[i], m)) != _dot(phi, la.matvec(self.right[i], m)):
                    return False
        return True


def _combine(mats, a, n):
    out = la.zeros(n, n)
    for c, m in zip(a, mats):
        if c:
            for r in range(n):
                for s in range(n):
                    out[r][s] += c * m[r][s]
    return out


def regular_bimodule(A):
    return Bimodule(A, [A.left_matrix(A.basis(i)) for i in range(A.dim)],
                    [A.right_matrix(A.basis(i)) for i in range(A.dim)])


def square_zero_extension(A, M):
    """A + M with (a, m)(a', m') = (a a', a m' + m a')."""
    d, r = A.dim, M.dim
    n = d + r
    mul = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(d):
        for j in range(d):
            mul[i][j][:d] = A.mul[i][j]
        for k in range(r):
            col_l = [M.left[i][s][k] for s in range(r)]
            col_r = [M.right[i][s][k] for s in range(r)]
            mul[i][d + k][d:] = col_l
            mul[d + k][i][d:] = col_r
    names = list(A.names) + [f"m{k}" for k in range(r)]
    return FinDimAlgebra(mul, A.unit + [Fraction(0)] * r, names)


def extended_slf(A, M, phi):
    return [Fraction(0)] * A.dim + _vec(phi)


# -- homs, projective bases, traces ----------------------------------------------


def hom_space(M1, M2):
    """Basis of Hom_A(M1, M2) as dim2 x dim1 matrices."""
    n1, n2 = M1.dim, M2.dim
    rows = []
    for R1, R2 in zip(M1.mats, M2.mats):
        # (F R1 - R2 F)[r][s] = sum_t F[r][t] R1[t][s] - sum_t R2[r][t] F[t][s]
        for r in range(n2):
            for s in range(n1):
                row = [Fraction(0)] * (n1 * n2)
                for t in range(n1):
                    row[r * n1 + t] += R1[t][s]
                for t in range(n2):
                    row[t * n1 + s] -= R2[r][t]
                if any(row):
                    rows.append(row)
    sols = la.nullspace(rows, n1 * n2) if rows else [
        [Fraction(int(i == j)) for j in range(n1 * n2)] for i in range(n1 * n2)]
    return [[v[r * n1:(r + 1) * n1] for r in range(n2)] for v in sols]


class ProjectiveBasis:
    """Vectors m_i and A-linear functionals alpha_i (d x dim M matrices) with m = sum m_i alpha_i(m)."""

    def __init__(self, module, vectors, functionals):
        self.module = module
        self.vectors = vectors
        self.functionals = functionals

    def __len__(self):
        return len(self.vectors)

    def check(self):
        M = self.module
        for k in range(M.dim):
            m = M.basis(k)
            total = [Fraction(0)] * M.dim
            for v, alpha in zip(self.vectors, self.functionals):
                total = _add(total, M.act(v, la.matvec(alpha, m)))
            if total != m:
                return False
        return True


def generators(M):
    gens = []
    span = []
    for k in range(M.dim):
        v = M.basis(k)
        if la.in_span(span, v):
            continue
        gens.append(v)
        span = la.row_basis([M.act(g, M.A.basis(i)) for g in gens for i in range(M.A.dim)], M.dim)
        if len(span) == M.dim:
            break
    return gens


def projectivity_and_basis(M, gens=None):
    """Projective basis from a free cover A^n -> M and a solved module splitting."""
    A = M.A
    d = A.dim
    gens = generators(M) if gens is None else gens
    n = len(gens)
    if M.dim == 0:
        return ProjectiveBasis(M, [], [])
    F = free_module(A, n)
    # cover P: column (k, i) is g_k . e_i
    P = la.transpose([M.act(g, A.basis(i)) for g in gens for i in range(d)])
    nd, dm = n * d, M.dim
    idx = lambda r, s: r * dm + s  # noqa: E731  unknown s[r][s], r < nd, s < dm
    rows, rhs = [], []
    for RM, RF in zip(M.mats, F.mats):
        for r in range(nd):
            for s in range(dm):
                row = [Fraction(0)] * (nd * dm)
                for t in range(dm):
                    if RM[t][s]:
                        row[idx(r, t)] += RM[t][s]
                for t in range(nd):
                    if RF[r][t]:
                        row[idx(t, s)] -= RF[r][t]
                if any(row):
                    rows.append(row)
                    rhs.append(Fraction(0))
    for r in range(dm):
        for s in range(dm):
            row = [Fraction(0)] * (nd * dm)
            for t in range(nd):
                if P[r][t]:
                    row[idx(t, s)] += P[r][t]
            rows.append(row)
            rhs.append(Fraction(int(r == s)))
    sol = la.solve(rows, rhs, nd * dm)
    if sol is None:
        raise NotProjectiveError("the free cover does not split")
    S = [sol[r * dm:(r + 1) * dm] for r in range(nd)]
    functionals = [S[k * d:(k + 1) * d] for k in range(n)]
    return ProjectiveBasis(M, gens, functionals)


def hs_trace(M, f, basis=None):
    """Hattori-Stallings trace sum_i alpha_i(f(m_i)), a representative in A."""
    basis = projectivity_and_basis(M) if basis is None else basis
    A = M.A
    total = A.zero()
    for v, alpha in zip(basis.vectors, basis.functionals):
        total = _add(total, la.matvec(alpha, la.matvec(f, v)))
    return total


def pseudo_trace(phi, M, f, basis=None):
    return _dot(phi, hs_trace(M, f, basis))


# -- decompositions ---------------------------------------------------------------


class Block:
    """One summand of an SLF decomposition: basic algebra P, its SLF, and the module M over P."""

    def __init__(self, idempotent, algebra, slf, module, to_block, act, basic_idempotent=None):
        self.idempotent = idempotent
        self.P = algebra
        self.phi = slf
        self.M = module
        self.to_block = to_block      # A-coords -> coords of the quotient block A'
        self.act = act                # a in A' -> left multiplication matrix on M
        self.f = basic_idempotent
        self._basis = None

    @property
    def projective_basis(self):
        if self._basis is None:
            self._basis = projectivity_and_basis(self.M)
        return self._basis

    def pseudo_trace_of(self, a):
        """(phi_i)_{M_i} of left multiplication by the image of a (given in A-coords)."""
        if self.M is None:
            return Fraction(0)
        return pseudo_trace(self.phi, self.M, self.act(la.matvec(self.to_block, a)),
                            self.projective_basis)

    def report(self):
        if self.P is None:
            return {"dim_P": 0, "dim_M": 0}
        J = jacobson_radical(self.P)
        semis = self.P.dim - len(J)
        Q = quotient_algebra(self.P, J)[0] if semis else None
        basic = Q is not None and Q.is_commutative()
        return {
            "dim_P": self.P.dim,
            "dim_M": self.M.dim,
            "P_symmetric": is_symmetric(self.P, self.phi),
            "P_nondegenerate": not slf_radical(self.P, self.phi),
            "P_basic_over_Q": basic,
        }


def _corner(A, f):
    vecs = [A.product(A.product(f, A.basis(i)), f) for i in range(A.dim)]
    return subalgebra(A, vecs, f)


def _block(A, phi, e, basic, seed):
    Ai, emb = subalgebra(A, [A.product(A.basis(j), e) for j in range(A.dim)], e)
    phi_i = [_dot(phi, col) for col in la.transpose(emb)]
    rad = slf_radical(Ai, phi_i)
    # A-coords -> Ai coords: a -> a e, then solve in the embedding
    k = Ai.dim
    a_to_ai = la.transpose([la.solve(emb, A.product(A.basis(j), e), k) for j in range(A.dim)])
    if len(rad) == Ai.dim:
        return Block(e, None, None, None, None, None)
    Ap, proj, lift = quotient_algebra(Ai, rad)
    phi_p = [_dot(phi_i, col) for col in la.transpose(lift)]
    to_block = la.matmul(proj, a_to_ai)
    if basic:
        f = basic_idempotent(Ap, seed)
    else:
        f = Ap.unit
    P, p_emb = _corner(Ap, f)
    phi_P = [_dot(phi_p, col) for col in la.transpose(p_emb)]
    # M = A' f, right P-module via m . p = m p
    m_span = la.row_basis([Ap.product(Ap.basis(j), f) for j in range(Ap.dim)], Ap.dim)
    m_inc = la.transpose(m_span)
    dm = len(m_span)
    mats = []
    for i in range(P.dim):
        p = la.matvec(p_emb, P.basis(i))
        cols = [la.solve(m_inc, Ap.product(s, p), dm) for s in m_span]
        mats.append(la.transpose(cols))
    M = RightModule(P, mats)

    def act(a):
        cols = [la.solve(m_inc, Ap.product(a, s), dm) for s in m_span]
        return la.transpose(cols)

    return Block(e, P, phi_P, M, to_block, act, f)


class Decomposition:
    def __init__(self, A, phi, blocks):
        self.A = A
        self.phi = phi
        self.blocks = blocks

    def reconstruct(self, a):
        return sum((b.pseudo_trace_of(a) for b in self.blocks), Fraction(0))

    def reconstruction_holds(self):
        return all(self.reconstruct(self.A.basis(i)) == _dot(self.phi, self.A.basis(i))
                   for i in range(self.A.dim))

    def radical_annihilates(self):
        """nu M_i = 0 for every nu in rad(phi)."""
        for nu in slf_radical(self.A, self.phi):
            for b in self.blocks:
                if b.M is None:
                    continue
                if any(any(r) for r in b.act(la.matvec(b.to_block, nu))):
                    return False
        return True

    def report(self):
        return {
            "blocks": [b.report() for b in self.blocks],
            "reconstruction": self.reconstruction_holds(),
            "radical_annihilates": self.radical_annihilates(),
        }


def decompose_slf_algebra(A, phi, basic=True, seed=0):
    """Split phi into pseudo-traces over basic symmetric algebras.

    For each central primitive idempotent e, phi restricted to Ae is pushed to
    A' = Ae / rad, and M = A' f with f a basic idempotent (f = 1 when basic=False)
    is a projective module over P = f A' f with phi(a) = sum_i phi_i(Tr_{M_i} a)."""
    phi = _vec(phi)
    if not is_symmetric(A, phi):
        raise ValueError("phi is not symmetric")
    blocks = [_block(A, phi, e, basic, seed) for e in central_idempotents(A, seed=seed)]
    return Decomposition(A, phi, blocks)


class BimoduleDecomposition:
    def __init__(self, A, M, phi, extension, inner):
        self.A = A
        self.M = M
        self.phi = phi
        self.extension = extension
        self.inner = inner

    def _m(self, m):
        return [Fraction(0)] * self.A.dim + _vec(m)

    def _a(self, a):
        return _vec(a) + [Fraction(0)] * self.M.dim

    def reconstruct(self, m):
        return self.inner.reconstruct(self._m(m))

    def reconstruction_holds(self):
        return all(self.reconstruct(self.M_basis(k)) == self.phi[k] for k in range(self.M.dim))

    def M_basis(self, k):
        return [Fraction(int(k == r)) for r in range(self.M.dim)]

    def f_laws_hold(self):
        """f_i(m a, u) = f_i(m, a u) and f_i(m, u p) = f_i(m, u) p on basis elements."""
        for b in self.inner.blocks:
            if b.M is None:
                continue
            for k in range(self.M.dim):
                fm = b.act(la.matvec(b.to_block, self._m(self.M_basis(k))))
                for i in range(self.A.dim):
                    ma = la.matvec(self.M.right[i], self.M_basis(k))
                    lhs = b.act(la.matvec(b.to_block, self._m(ma)))
                    a_act = b.act(la.matvec(b.to_block, self._a(self.A.basis(i))))
                    if lhs != la.matmul(fm, a_act):
                        return False
                for R in b.M.mats:
                    if la.matmul(fm, R) != la.matmul(R, fm):
                        return False
        return True

    def report(self):
        return {
            "blocks": [b.report() for b in self.inner.blocks],
            "reconstruction": self.reconstruction_holds(),
            "f_laws": self.f_laws_hold(),
        }


def decompose_slf_bimodule(A, M, phi, basic=True, seed=0):
    """Decompose a symmetric functional on a bimodule through the square-zero extension."""
    phi = _vec(phi)
    if not M.is_symmetric(phi):
        raise ValueError("phi is not symmetric on the bimodule")
    ext = square_zero_extension(A, M)
    inner = decompose_slf_algebra(ext, extended_slf(A, M, phi), basic=basic, seed=seed)
    return BimoduleDecomposition(A, M, phi, ext, inner)


# -- sample algebras --------------------------------------------------------------


def _E(i, j, n=2):
    m = la.zeros(n, n)
    m[i][j] = Fraction(1)
    return m


def algebra_Q():
    return FinDimAlgebra([[[1]]], [1], ["1"])


def algebra_dual_numbers():
    return FinDimAlgebra([[[1, 0], [0, 1]], [[0, 1], [0, 0]]], [1, 0], ["1", "eps"])


def algebra_QxQ():
    return FinDimAlgebra([[[1, 0], [0, 0]], [[0, 0], [0, 1]]], [1, 1], ["(1,0)", "(0,1)"])


def algebra_M2():
    return matrix_algebra([_E(0, 0), _E(0, 1), _E(1, 0), _E(1, 1)], ["e11", "e12", "e21", "e22"])


def algebra_upper_triangular():
    return matrix_algebra([_E(0, 0), _E(0, 1), _E(1, 1)], ["e11", "e12", "e22"])


def algebra_M2_x_dual():
    return direct_product(algebra_M2(), algebra_dual_numbers())


def corpus():
    return {
        "Q": algebra_Q(),
        "Q[eps]": algebra_dual_numbers(),
        "QxQ": algebra_QxQ(),
        "M2": algebra_M2(),
        "upper2": algebra_upper_triangular(),
        "M2xQ[eps]": algebra_M2_x_dual(),
    }


def random_slf(A, rng):
    basis = slf_space(A)
    while True:
        phi = A.zero()
        for b in basis:
            phi = _add(phi, _scale(Fraction(rng.randint(-3, 3)), b))
        if any(phi):
            return phi


def random_hom(M1, M2, rng, space=None):
    space = hom_space(M1, M2) if space is None else space
    out = la.zeros(M2.dim, M1.dim)
    for h in space:
        c = Fraction(rng.randint(-4, 4))
        for r in range(M2.dim):
            for s in range(M1.dim):
                out[r][s] += c * h[r][s]
    return out


def sample_projectives(A, seed=0):
    """A, A^2 and eA for a basic idempotent e (when it is proper)."""
    mods = {"A": free_module(A), "A^2": free_module(A, 2)}
    e = basic_idempotent(A, seed)
    if e != A.unit:
        mods["eA"] = ideal_module(A, e)
    for k, c in enumerate(central_idempotents(A, seed=seed)):
        if c != A.unit:
            mods[f"cA{k}"] = ideal_module(A, c)
    return mods


# -- corpus laws ----------------------------------------------------------------------


def distinct_slfs(A, count, rng):
    """`count` pairwise distinct nonzero SLFs (fewer only if none exist)."""
    if not slf_space(A):
        return []
    seen = []
    tries = 0
    while len(seen) < count and tries < 200:
        phi = random_slf(A, rng)
        if phi not in seen:
            seen.append(phi)
        tries += 1
    return seen


def _hs_pair(A, mods, bases, comm, rng):
    names = sorted(mods)
    a, b = rng.choice(names), rng.choice(names)
    f = random_hom(mods[a], mods[b], rng)
    g = random_hom(mods[b], mods[a], rng)
    t1 = hs_trace(mods[a], la.matmul(g, f), bases[a])
    t2 = hs_trace(mods[b], la.matmul(f, g), bases[b])
    return {"modules": [a, b]}, same_class(A, t1, t2, comm)


def bimodule_instances():
    Q, M2 = algebra_Q(), algebra_M2()
    return {
        "Q-regular": (Q, regular_bimodule(Q), [Fraction(1)]),
        "M2-regular": (M2, regular_bimodule(M2), [Fraction(1), Fraction(0), Fraction(0), Fraction(1)]),
    }


def verify_corpus_laws(seed=0, pairs=50, slfs=3):
    """Trace symmetry, SLF reconstruction and radical annihilation over the sample algebras."""
    from ._report import report
    out = []
    for name, A in sorted(corpus().items()):
        rng = random.Random(f"{seed}:{name}")
        mods = sample_projectives(A, seed)
        bases = {k: projectivity_and_basis(m) for k, m in mods.items()}
        comm = commutator_subspace(A)
        for t in range(pairs):
            idx, ok = _hs_pair(A, mods, bases, comm, rng)
            out.append(report("trace-symmetry", {"algebra": name, "sample": t, **idx}, lambda ok=ok: ok))
        for phi in distinct_slfs(A, slfs, rng):
            dec = decompose_slf_algebra(A, phi, seed=seed)
            idx = {"algebra": name, "slf": [str(x) for x in phi]}
            out.append(report("slf-reconstruction", idx, dec.reconstruction_holds))
            out.append(report("radical-annihilates", idx, dec.radical_annihilates))
    for name, (A, M, phi) in sorted(bimodule_instances().items()):
        dec = decompose_slf_bimodule(A, M, phi, seed=seed)
        out.append(report("bimodule-reconstruction", {"instance": name}, dec.reconstruction_holds))
        out.append(report("bimodule-f-laws", {"instance": name}, dec.f_laws_hold))
    return out
