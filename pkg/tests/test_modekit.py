import json
from collections import Counter
from fractions import Fraction

import pytest
import sympy

from pseudotrace.errors import TruncationOverflow
from pseudotrace.modekit import (GradedVertexData, Vector, builtin, compute_A_coeffs, diamond,
                                 from_json, heisenberg_data, quotient_algebra, star_n,
                                 star_n_right, u1, u1_inverse, validate_data,
                                 verify_mode_algebra, verify_u1_identities, UMatrix)
from pseudotrace.scalar import Scalar


def flow_coefficients(J):
    """A_j with exp(sum A_j y^{j+1} d/dy) y = log(1 + y), solved jointly in sympy."""
    y = sympy.Symbol("y")
    a = sympy.symbols(f"a1:{J + 1}")
    field = sum(a[j - 1] * y ** (j + 1) for j in range(1, J + 1))
    term, total = y, y
    for k in range(1, J + 1):
        term = sympy.expand(field * sympy.diff(term, y) / k)
        term = sum(term.coeff(y, e) * y ** e for e in range(J + 2))
        total += term
    target = sympy.series(sympy.log(1 + y), y, 0, J + 2).removeO()
    eqs = [sympy.expand(total - target).coeff(y, e) for e in range(2, J + 2)]
    sol = sympy.solve(eqs, a, dict=True)[0]
    return [sol[s] for s in a]


def test_A_coefficients_match_sympy_flow():
    J = 5
    expected = flow_coefficients(J)
    got = compute_A_coeffs(J)
    for j, (g, e) in enumerate(zip(got, expected), start=1):
        # rescaling y by k puts one power of k on A_j per degree
        assert g == Scalar(Fraction(int(e.p), int(e.q)), j)


def test_heisenberg_dims_are_partition_counts(heis6):
    assert heis6.dims() == [sympy.partition(h) for h in range(7)]


def test_heisenberg_cutoff_limit():
    with pytest.raises(ValueError):
        heisenberg_data(7)


def test_builtin_data_is_consistent(heis4, trivial):
    assert validate_data(heis4) == []
    assert validate_data(trivial) == []


def test_wrong_conformal_vector_is_caught(heis4):
    V = heis4
    bad = GradedVertexData(V.D, V.labels, V.weights, V.vacuum, V.omega * 2, V.c, V._mode_fn)
    assert any("L(0)" in p for p in validate_data(bad))


def test_modes_above_cutoff_overflow(heis4):
    a = heis4.labels.index("a(-1) 1")
    with pytest.raises(TruncationOverflow):
        heis4.apply(a, -5, heis4.one())


def test_json_round_trip(heis4):
    V = from_json(json.dumps(heis4.to_json()))
    assert V.dims() == heis4.dims()
    for u in range(V.dim):
        for j in range(V.dim):
            for n in range(-2, 3):
                try:
                    want = heis4.apply(u, n, heis4.state(j))
                except TruncationOverflow:
                    continue
                assert V.apply(u, n, V.state(j)) == want


def test_u1_on_low_states(heis4):
    V = heis4
    a = V.labels.index("a(-1) 1")
    assert u1(V, V.one()) == V.one()
    assert u1(V, V.state(a)) == Vector({a: Scalar(1, 1)})
    assert u1(V, V.omega) == (V.omega - V.one() * Fraction(1, 24)) * Scalar(1, 2)


def test_u1_inverse(heis4):
    V = heis4
    for i in V.states_up_to(4):
        assert u1_inverse(V, u1(V, V.state(i))) == V.state(i)


def test_heisenberg_product(heis4):
    V = heis4
    a = V.labels.index("a(-1) 1")
    aa = V.labels.index("a(-1) a(-1) 1")
    assert star_n(V, V.state(a), V.state(a), 0) == V.state(aa)
    assert star_n_right(V, V.state(a), V.one(), 0) == V.state(a)


def test_quotient_is_polynomial_ring(heis4):
    q = quotient_algebra(heis4, 0, 4)
    assert [heis4.labels[r] for r in q.reps] == [
        "1", "a(-1) 1", "a(-1) a(-1) 1", "a(-1) a(-1) a(-1) 1", "a(-1) a(-1) a(-1) a(-1) 1"]
    for i in range(q.dim):
        for j in range(q.dim):
            if q.table[i][j] is None:
                assert i + j > 4
            else:
                assert q.table[i][j] == [Fraction(int(k == i + j)) for k in range(q.dim)]
    with pytest.raises(TruncationOverflow):
        q.algebra


def test_diamond_identity_entries(heis4):
    V = heis4
    one = UMatrix.single(1, 0, 0, V.one()) + UMatrix.single(1, 1, 1, V.one())
    a = V.state(V.labels.index("a(-1) 1"))
    m = UMatrix.single(1, 0, 1, a)
    assert diamond(V, one, m, "plain", "left") == m


def test_suites_have_no_failures(heis4, trivial):
    for V in (heis4, trivial):
        counts = Counter(r["status"] for r in verify_u1_identities(V))
        assert counts["FAIL"] == 0 and counts["PASS"] > 0
    counts = Counter(r["status"] for r in verify_mode_algebra(trivial))
    assert set(counts) == {"PASS"}


def test_mode_algebra_on_heisenberg(heis4):
    counts = Counter(r["status"] for r in verify_mode_algebra(heis4, N_max=1))
    assert counts["FAIL"] == 0 and counts["PASS"] > 100
