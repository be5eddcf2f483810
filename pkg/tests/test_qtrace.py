from collections import Counter
from fractions import Fraction

import pytest
import sympy

from pseudotrace import qtrace as qt
from pseudotrace.algkit import algebra_dual_numbers, algebra_M2
from pseudotrace.errors import TruncationOverflow
from pseudotrace.modekit import Vector, from_json
from pseudotrace.qexp import tilde_wp2
from pseudotrace.scalar import Scalar
from pseudotrace.series import LaurentSeries


def is_zero_series(s):
    return not any(c for block in s.blocks.values() for c in block.coeffs.values())


@pytest.fixture(scope="module")
def S5(heis5):
    return qt.shifted_trace(qt.TraceContext(heis5))


def alpha(V):
    return V.state(V.labels.index("a(-1) 1"))


def test_character_is_partition_generating_function(heis5, S5):
    comps = S5.components(heis5.one())
    assert set(k for k, _ in comps) == {0}
    assert [comps[(0, n)] for n in range(6)] == [Scalar(sympy.partition(n)) for n in range(6)]
    assert S5.r == Fraction(-1, 24)


def test_conformal_vector_counts_weights(heis5, S5):
    for n in range(6):
        assert S5.coefficient(heis5.omega, n) == Scalar(Fraction(24 * n - 1, 24) * sympy.partition(n), 2)


def test_quadratic_state(heis5, S5):
    # o(a(-1)^2 1) = 2 sum_k a(-k) a(k) has trace n p(n) * 2 on weight n; U(1) subtracts 1/12
    aa = heis5.state(heis5.labels.index("a(-1) a(-1) 1"))
    for n in range(4):
        p = sympy.partition(n)
        assert S5.coefficient(aa, n) == Scalar(Fraction(2 * n * p) - Fraction(p, 12), 2)


def test_odd_state_has_zero_trace(heis5, S5):
    assert is_zero_series(S5(alpha(heis5)))


def test_trivial_character(trivial):
    S = qt.shifted_trace(qt.TraceContext(trivial), q_order=3)
    assert S.components(trivial.one()) == {(0, 0): Scalar(1)}


def test_q_order_beyond_cutoff(heis4):
    with pytest.raises(TruncationOverflow):
        qt.shifted_trace(qt.TraceContext(heis4), q_order=5)


def test_block_conditions_on_heisenberg(heis5, S5):
    reps = qt.conformal_block_reports(S5)
    assert Counter(r["status"] for r in reps) == Counter({"PASS": len(reps)})


def test_block_conditions_on_trivial(trivial):
    S = qt.shifted_trace(qt.TraceContext(trivial), q_order=3)
    reps = qt.conformal_block_reports(S)
    assert {r["status"] for r in reps} == {"PASS"}


def test_random_map_is_not_a_block(heis5):
    R = qt.random_map(heis5, 3, seed=4)
    a = alpha(heis5)
    assert not is_zero_series(qt.check_condition_wp2(R, a, a, q_order=3))
    assert not is_zero_series(qt.check_condition_derivative(R, heis5.one(), q_order=3))


def test_dropping_sigma_terms_only_touches_zero_modes(heis5, S5):
    # the dropped terms sit at x^0, so they only ever see S(v_0 w); a(-1) has a zero zero-mode
    a = alpha(heis5)
    assert is_zero_series(qt.check_condition_wp2(S5, a, a, q_order=3, perturbed=True))


def test_tampered_wp2_kernel_is_detected(heis5, S5):
    V = heis5
    a = alpha(V)
    kernel = tilde_wp2(1, 2)
    rows = {s: qt.residue(V, kernel.q_coefficient(s), a, a) for s in range(3)}
    assert not qt._convolve(S5, rows, 2)
    bump = LaurentSeries({-1: Scalar(1, 2)}, lo=-1, hi=kernel.q_coefficient(1).hi)
    rows[1] = qt.residue(V, kernel.q_coefficient(1) + bump, a, a)
    assert qt._convolve(S5, rows, 2)


def test_operator_identities(heis5):
    V = heis5
    for w in [V.one(), alpha(V), V.omega]:
        reps = qt.verify_operator_identities(V, w, q_order=3)
        assert {r["status"] for r in reps} == {"PASS"}


def test_residue_lemma_examples(heis5):
    V = heis5
    a = alpha(V)
    lhs, rhs = qt.residue_lemma_sides(V, 0, 0, a, a)
    assert lhs == rhs and lhs
    lhs, rhs = qt.residue_lemma_sides(V, 0, 2, V.omega, V.one())
    assert lhs == rhs
    lhs, rhs = qt.residue_lemma_sides(V, 1, 2, a, a, sign=-1)
    assert lhs == rhs and lhs
    with pytest.raises(ValueError):
        qt.residue_lemma_sides(V, 2, 1, a, a)


def test_residue_lemma_grid_trivial(trivial):
    assert {r["status"] for r in qt.residue_lemma_grid(trivial)} == {"PASS"}


def test_vanishing_needs_its_precondition(heis5, S5):
    a = alpha(heis5)
    assert qt.trace_vanishing(S5, 0, 1, 0, a, a) == 0
    # m = n = 1 violates 2m <= n and p = 1 is visibly nonzero
    assert qt.trace_vanishing(S5, 1, 1, 1, a, a) != 0


def test_grading_on_character(heis5, S5):
    one = heis5.one()
    for n in range(2):
        assert qt.trace_grading(S5, n, one) == 0
    # the n = 2 residue lands in weight 6, past the cutoff
    with pytest.raises(TruncationOverflow):
        qt.trace_grading(S5, 2, one)


def test_derived_identities_small_grid(heis5, S5):
    reps = qt.verify_derived_trace_identities(S5, max_n=2, max_m4=1, max_grading=1)
    counts = Counter(r["status"] for r in reps)
    assert counts["FAIL"] == 0 and counts["PASS"] > 50


def test_symmetry_of_diamond_trace(heis5, S5):
    V = heis5
    for v in qt.test_vectors(V, 1):
        for w in qt.test_vectors(V, 1):
            assert qt.check_symmetry(S5, v, w) == 0


@pytest.mark.parametrize("make,phi", [
    (algebra_dual_numbers, [Fraction(2), Fraction(3)]),
    (algebra_M2, [Fraction(1), Fraction(0), Fraction(0), Fraction(1)]),
])
def test_pseudo_trace_on_tensor_module(heis4, make, phi):
    # on V (x) P the pseudo-trace factors as phi(p) times the plain trace
    P = make()
    W, action = qt.tensor_module(heis4, P)
    S = qt.shifted_trace(qt.TraceContext(W, P, phi, action), q_order=2)
    plain = qt.shifted_trace(qt.TraceContext(heis4), q_order=2)
    d = P.dim
    for i in heis4.states_up_to(2):
        for p in range(d):
            for n in range(3):
                want = plain.coefficient(heis4.state(i), n) * phi[p]
                assert S.coefficient(Vector.basis(i * d + p), n) == want


def test_action_must_commute(heis4):
    P = algebra_dual_numbers()
    W, action = qt.tensor_module(heis4, P)
    bad = [action[0], [[x * 0 for x in row] for row in action[0]]]
    bad[1][0][1] = Fraction(1)
    with pytest.raises(ValueError):
        qt.TraceContext(W, P, [1, 0], bad)


LOG_TOY = {
    "D": 2, "closed": True, "c": "0", "vacuum": 0,
    "weights": [0, 0, 2], "labels": ["1", "b", "w"],
    "omega": {"2": "1"},
    "modes": {
        "0": {"-1": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
        "1": {"-1": [[0, 0, 0], [1, 0, 0], [0, 0, 0]]},
        "2": {"-1": [[0, 0, 0], [0, 0, 0], [1, 0, 0]],
              "1": [[0, 1, 0], [0, 0, 0], [0, 0, 2]]},
    },
}


def test_log_terms_from_nilpotent_grading():
    # L(0) b = 1 on the weight-0 space, so L(0) is not semisimple there
    V = from_json(LOG_TOY, validate=False)
    ctx = qt.TraceContext(V)
    assert ctx.K == 1
    S = qt.shifted_trace(ctx, q_order=2)
    b = V.state(1)
    assert S.coefficient(b, 0, 0) == 0
    assert S.coefficient(b, 0, 1) == 1
    assert S.components(V.one()) == {(0, 0): Scalar(2), (0, 2): Scalar(1)}
    assert any(k == 1 for _, k in S(b).blocks)
