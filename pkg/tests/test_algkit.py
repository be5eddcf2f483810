import json
import random
from fractions import Fraction

import pytest

from pseudotrace import algkit as ak
from pseudotrace import _linalg as la


DIMS = {
    # name: (dim, dim rad, dim center, dim SLF space, central primitive idempotents)
    "Q": (1, 0, 1, 1, 1),
    "Q[eps]": (2, 1, 2, 2, 1),
    "QxQ": (2, 0, 2, 2, 2),
    "M2": (4, 0, 1, 1, 1),
    "upper2": (3, 1, 1, 2, 1),
    "M2xQ[eps]": (6, 1, 3, 3, 2),
}


@pytest.mark.parametrize("name", sorted(DIMS))
def test_structure_dimensions(name):
    A = ak.corpus()[name]
    dim, rad, cen, slf, idem = DIMS[name]
    assert A.dim == dim
    assert len(ak.jacobson_radical(A)) == rad
    assert len(ak.center(A)) == cen
    assert len(ak.slf_space(A)) == slf
    assert len(ak.central_idempotents(A)) == idem


@pytest.mark.parametrize("name", sorted(DIMS))
def test_radical_is_nilpotent(name):
    A = ak.corpus()[name]
    for r in ak.jacobson_radical(A):
        assert not any(A.power(r, A.dim))


@pytest.mark.parametrize("name", sorted(DIMS))
def test_central_idempotents_partition_unity(name):
    A = ak.corpus()[name]
    es = ak.central_idempotents(A)
    total = A.zero()
    for i, e in enumerate(es):
        assert A.product(e, e) == e
        for j, f in enumerate(es):
            if i != j:
                assert not any(A.product(e, f))
        total = [x + y for x, y in zip(total, e)]
    assert total == A.unit


def test_known_radicals():
    dual = ak.algebra_dual_numbers()
    (r,) = ak.jacobson_radical(dual)
    assert r[0] == 0 and r[1] != 0
    up = ak.algebra_upper_triangular()
    (r,) = ak.jacobson_radical(up)
    assert r[0] == 0 and r[2] == 0 and r[1] != 0


def test_matrix_trace_is_symmetric_and_transpose_entry_is_not():
    M2 = ak.algebra_M2()
    assert ak.is_symmetric(M2, [1, 0, 0, 1])
    assert not ak.is_symmetric(M2, [0, 1, 0, 0])
    with pytest.raises(ValueError):
        ak.decompose_slf_algebra(M2, [0, 1, 0, 0])


def test_bad_structure_constants_rejected():
    # e0 e0 = e1 with e1 as the unit is not associative-unital data
    with pytest.raises(ValueError):
        ak.FinDimAlgebra([[[0, 1], [1, 0]], [[1, 0], [0, 0]]], [0, 1])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_on_free_module(n):
    # Tr of id on A^n is n*1 up to commutators, so phi of it is n*phi(1)
    A = ak.algebra_upper_triangular()
    phi = [Fraction(2), Fraction(5), Fraction(-1)]
    M = ak.free_module(A, n)
    got = ak.pseudo_trace(phi, M, la.identity(M.dim))
    assert got == n * (phi[0] + phi[2])


def test_row_ideal_of_matrices():
    M2 = ak.algebra_M2()
    e11 = M2.basis(0)
    M = ak.ideal_module(M2, e11)
    assert M.dim == 2
    assert ak.pseudo_trace([1, 0, 0, 1], M, la.identity(2)) == 1


def test_simple_module_over_dual_numbers_is_not_projective():
    A = ak.algebra_dual_numbers()
    S = ak.RightModule(A, [[[1]], [[0]]])
    with pytest.raises(ak.NotProjectiveError):
        ak.projectivity_and_basis(S)


@pytest.mark.parametrize("name", sorted(DIMS))
def test_projective_bases_split(name):
    A = ak.corpus()[name]
    for M in ak.sample_projectives(A).values():
        assert ak.projectivity_and_basis(M).check()


@pytest.mark.parametrize("name", sorted(DIMS))
@pytest.mark.parametrize("basic", [True, False])
def test_decomposition_reconstructs(name, basic):
    A = ak.corpus()[name]
    rng = random.Random(name)
    for phi in ak.distinct_slfs(A, 3, rng):
        d = ak.decompose_slf_algebra(A, phi, basic=basic)
        assert d.reconstruction_holds()
        assert d.radical_annihilates()
        for b in d.report()["blocks"]:
            if b["dim_P"]:
                assert b["P_symmetric"] and b["P_nondegenerate"]


def test_basic_reduction_of_matrix_algebra():
    d = ak.decompose_slf_algebra(ak.algebra_M2(), [1, 0, 0, 1])
    (b,) = d.report()["blocks"]
    assert b["dim_P"] == 1 and b["dim_M"] == 2
    d = ak.decompose_slf_algebra(ak.algebra_M2(), [1, 0, 0, 1], basic=False)
    (b,) = d.report()["blocks"]
    assert b["dim_P"] == 4 and b["dim_M"] == 4


def test_degenerate_slf_drops_semisimple_part():
    # phi = eps^* on Q[eps] is nondegenerate; phi = 1^* kills eps and factors through Q
    A = ak.algebra_dual_numbers()
    d = ak.decompose_slf_algebra(A, [1, 0])
    (b,) = d.report()["blocks"]
    assert b["dim_P"] == 1
    d = ak.decompose_slf_algebra(A, [0, 1])
    (b,) = d.report()["blocks"]
    assert b["dim_P"] == 2


@pytest.mark.parametrize("name", ["Q-regular", "M2-regular"])
def test_bimodule_decomposition(name):
    A, M, phi = ak.bimodule_instances()[name]
    rep = ak.decompose_slf_bimodule(A, M, phi).report()
    assert rep["reconstruction"] and rep["f_laws"]


def test_json_round_trip():
    A = ak.algebra_M2_x_dual()
    B = ak.FinDimAlgebra.from_json(json.loads(json.dumps(A.to_json())))
    assert B.mul == A.mul and B.unit == A.unit and B.names == A.names


def test_corpus_laws_small_sample():
    reps = ak.verify_corpus_laws(seed=1, pairs=5, slfs=2)
    assert reps
    assert {r["status"] for r in reps} == {"PASS"}
