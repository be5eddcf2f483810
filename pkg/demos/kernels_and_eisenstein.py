# Exact q-expansions of the Weierstrass kernels and the Eisenstein series.
# Everything is a polynomial in k = 2*pi*i with rational coefficients, so
# comparisons are equalities, not tolerances. Only the last cell uses floats.

from pseudotrace import KAPPA
from pseudotrace.qexp import (derivative_relation_residual, eisenstein_qexp, kernel_expansion_check,
                              modular_numeric_check, tilde_wp2)

# G4 through q^5; the constant term carries k^4, the rest is 2 k^4/3! sigma_3(n)
G4 = eisenstein_qexp(4, 5)
for n, c in G4.items():
    print(f"G4  q^{n}:", c)

# the kernel built from exponentials, one row per power of q
wp2 = tilde_wp2(4, 2)
for s in range(3):
    print(f"wp2~ q^{s}:", wp2.q_coefficient(s))

# expanding the same kernel in x around 0 gives Eisenstein-weighted powers of x;
# both rectangles must agree coefficient for coefficient
res = kernel_expansion_check((-2, 8), 8, (-1, 9))
for key in ("wp2", "wp1"):
    print(key, "window", res[key]["x_window"], "discrepancies:", res[key]["discrepancies"])

# the two kernels are related by an x-derivative plus G2
print("derivative relation residual terms:", derivative_relation_residual(6, 4).coeffs)

# numerics: G_{2k}(-1/tau) = tau^{2k} G_{2k}(tau)
for tau in (2j, 1 + 2j):
    for w in (4, 6):
        print(f"tau={tau}  weight {w}: |defect| = {modular_numeric_check(w, tau, 40):.2e}")

print("k evaluates to", KAPPA.evaluate())
