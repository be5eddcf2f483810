# Symmetric linear functions on small algebras and the pseudo-traces that rebuild them.

import random
from fractions import Fraction

from pseudotrace import algkit as ak
from pseudotrace import _linalg as la

# the dual numbers Q[eps]: every linear function is symmetric because the algebra is commutative
A = ak.algebra_dual_numbers()
print(A, "radical:", ak.jacobson_radical(A), "SLF space:", ak.slf_space(A))

# phi(a + b eps) = b is nondegenerate, so nothing is lost in the decomposition
phi = [Fraction(0), Fraction(1)]
d = ak.decompose_slf_algebra(A, phi)
print(d.report())

# the simple module Q (eps acting by 0) is not projective; the free cover cannot split
S = ak.RightModule(A, [[[1]], [[0]]])
try:
    ak.projectivity_and_basis(S)
except ak.NotProjectiveError as exc:
    print("simple module:", exc)

# 2x2 matrices: the trace is the only SLF up to scale and the basic reduction lands on Q
M2 = ak.algebra_M2()
d = ak.decompose_slf_algebra(M2, [1, 0, 0, 1])
print("M2 blocks:", d.report()["blocks"])

# Tr(fg) = Tr(gf) modulo commutators, for maps between two different projectives
rng = random.Random(0)
U = ak.algebra_upper_triangular()
P1, P2 = ak.free_module(U), ak.free_module(U, 2)
f, g = ak.random_hom(P1, P2, rng), ak.random_hom(P2, P1, rng)
t1 = ak.hs_trace(P1, la.matmul(g, f))
t2 = ak.hs_trace(P2, la.matmul(f, g))
print("Tr(gf) =", t1, " Tr(fg) =", t2, " same class:", ak.same_class(U, t1, t2))

# the corpus sweep behind the acceptance run, smaller
counts = {}
for r in ak.verify_corpus_laws(seed=0, pairs=5, slfs=2):
    counts[r["identity"]] = counts.get(r["identity"], 0) + (r["status"] == "PASS")
print(counts)
