import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitreg import GF, QQ, Matrix
from orbitreg.algmod import (
    AlgebraPresentation,
    ModulePoint,
    UnsupportedField,
    direct_sum,
    end_algebra,
    find_isomorphism,
    fitting_split,
    generated_submodule,
    hom_dim,
    hom_space,
    is_hom,
    is_isomorphic,
    is_radical_hom,
    is_split_indecomposable,
    orbit_dim,
    quotient,
    split_local_by_enumeration,
    submodule,
    validate_module,
)
from orbitreg.generators import random_small_module, random_unimodular
from orbitreg.oracles import Partition, jordan_module

from conftest import brute_force_hom_count_f2, dual_numbers_pair, free_module, kronecker_algebra, kronecker_pair, mat, selfext_modules


# -- presentations and validation ------------------------------------------------


def test_word_indices_checked():
    with pytest.raises(ValueError):
        AlgebraPresentation(QQ, 1, (((1, (1,)),),))


def test_validate_selfext_modules(selfext):
    Z, Y = selfext_modules(selfext)
    assert validate_module(Y).ok
    assert validate_module(Z).ok


def test_validate_names_failing_relation():
    alg = dual_numbers_pair()
    m = ModulePoint.of(alg, [Matrix.identity(QQ, 2), Matrix.zeros(QQ, 2, 2)])
    rep = validate_module(m)
    assert not rep.ok
    assert rep.values["failing_relation"] == 0
    assert "alpha" in rep.details[0]


def test_free_algebra_accepts_anything():
    assert validate_module(free_module([[[1, 2], [3, 4]], [[5, 6], [7, 8]]])).ok


def test_generator_count_checked():
    with pytest.raises(ValueError):
        ModulePoint.of(dual_numbers_pair(), [Matrix.identity(QQ, 2)])


# -- Hom spaces -------------------------------------------------------------------


def test_kronecker_hom_dims_against_hand_count():
    # by hand: phi commutes with the idempotents, so phi = diag(p, q), and the
    # arrow a imposes q*M(a) = N(a)*p entrywise
    M, N = kronecker_pair()
    assert (hom_dim(M, M), hom_dim(N, N), hom_dim(M, N), hom_dim(N, M)) == (1, 2, 1, 1)
    assert hom_dim(direct_sum(M, M), N) == 2 * hom_dim(M, N)


def test_kronecker_hom_dims_f2_brute_force():
    M, N = kronecker_pair(GF(2))
    for a, b in [(M, M), (N, N), (M, N), (N, M)]:
        ints = lambda mod: [[[int(x) for x in r] for r in m.tolist()] for m in mod.mats]  # noqa: E731
        count = brute_force_hom_count_f2(ints(a), ints(b))
        assert count == 2 ** hom_dim(a, b)


def test_selfext_module_end_dims(selfext):
    Z, Y = selfext_modules(selfext)
    assert hom_dim(Z, Z) - hom_dim(Y, Y) == 2
    assert (hom_dim(Z, Z), hom_dim(Y, Y)) == (6, 4)


def test_selfext_module_end_dims_brute_force_f2(selfext):
    # independent oracle: enumerate all 2^16 matrices over F_2 for End(Y)
    import itertools

    import numpy as np

    Z, Y = selfext_modules(selfext, GF(2))
    for m, want in ((Z, 6), (Y, 4)):
        A = [np.array([[int(x) for x in r] for r in g.tolist()]) for g in m.mats]
        count = 0
        for flat in itertools.product((0, 1), repeat=16):
            phi = np.array(flat).reshape(4, 4)
            if all((((phi @ a) - (a @ phi)) % 2 == 0).all() for a in A):
                count += 1
        assert count == 2 ** want


def test_hom_basis_elements_are_homs_and_contain_identity():
    rng = random.Random(3)
    for _ in range(20):
        _, m = random_small_module(rng)
        H = hom_space(m, m)
        assert all(is_hom(b, m, m) for b in H.basis)
        # identity lies in the span
        from orbitreg.algmod import Coordinates

        assert Coordinates(H.basis).coords(m.identity()) is not None


def test_zero_module_homs():
    alg = kronecker_algebra()
    z = ModulePoint.zero(alg)
    M, _ = kronecker_pair()
    assert hom_dim(z, M) == 0 and hom_dim(M, z) == 0
    assert orbit_dim(z) == 0
    assert direct_sum(M, z) == M


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_hom_dim_conjugation_invariant_and_additive(seed):
    rng = random.Random(seed)
    _, m = random_small_module(rng)
    g = random_unimodular(QQ, m.d, rng)
    mg = m.conjugate(g)
    assert hom_dim(m, m) == hom_dim(mg, m) == hom_dim(mg, mg)
    assert orbit_dim(m) + hom_dim(m, m) == m.d ** 2
    # additivity on both sides
    s = direct_sum(m, mg)
    assert hom_dim(s, m) == 2 * hom_dim(m, m)
    assert hom_dim(m, s) == 2 * hom_dim(m, m)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.lists(st.integers(0, 1), min_size=2, max_size=2), min_size=2, max_size=2), min_size=1, max_size=2),
       st.lists(st.lists(st.lists(st.integers(0, 1), min_size=2, max_size=2), min_size=2, max_size=2), min_size=1, max_size=2))
def test_hom_dim_matches_f2_enumeration(ms, ns):
    t = min(len(ms), len(ns))
    ms, ns = ms[:t], ns[:t]
    M = free_module(ms, GF(2))
    N = free_module(ns, GF(2))
    assert 2 ** hom_dim(M, N) == brute_force_hom_count_f2(ms, ns)


def test_orbit_dim_examples():
    M, N = kronecker_pair()
    assert orbit_dim(M) == 3 and orbit_dim(N) == 2
    assert orbit_dim(jordan_module(Partition((3,)), QQ)) == 6


# -- endomorphism algebras -----------------------------------------------------


def test_end_algebra_structure_constants_reproduce_products():
    m = direct_sum(jordan_module(Partition((2,)), QQ), jordan_module(Partition((1,)), QQ))
    E = end_algebra(m)
    n = E.dim
    for i in range(n):
        for j in range(n):
            prod = E.basis[i] @ E.basis[j]
            combo = Matrix.zeros(QQ, m.d, m.d)
            for k in range(n):
                if E.structure_constants[i][j][k]:
                    combo = combo + E.basis[k].scale(E.structure_constants[i][j][k])
            assert combo == prod


def test_j2_plus_j1_radical():
    m = direct_sum(jordan_module(Partition((2,)), QQ), jordan_module(Partition((1,)), QQ))
    E = end_algebra(m)
    # sum of min(lambda_i, lambda_j) = 2 + 1 + 1 + 1; End/rad = k x k
    assert E.dim == 5
    assert E.radical_dim == 3
    assert all(r.is_nilpotent() for r in E.radical_basis)
    assert is_split_indecomposable(m) == "no"


def test_radical_is_nilpotent_two_sided_ideal(selfext):
    Z, _ = selfext_modules(selfext)
    E = end_algebra(Z)
    assert all(r.is_nilpotent() for r in E.radical_basis)
    for r in E.radical_basis:
        for b in E.basis:
            assert E.in_radical(r @ b) and E.in_radical(b @ r)
    assert is_split_indecomposable(Z) == "yes"


def test_one_dimensional_end():
    M, _ = kronecker_pair()
    E = end_algebra(M)
    assert E.dim == 1 and E.radical_dim == 0
    assert is_split_indecomposable(M) == "yes"


def test_gaussian_rationals_inconclusive():
    m = free_module([[[0, -1], [1, 0]]])
    assert end_algebra(m).radical_dim == 0
    assert is_split_indecomposable(m) == "inconclusive"


@pytest.mark.parametrize("n", range(1, 7))
def test_single_jordan_block_split_indecomposable(n):
    assert is_split_indecomposable(jordan_module(Partition((n,)), QQ)) == "yes"


def test_prime_field_radical_unsupported():
    m = jordan_module(Partition((2,)), GF(3))
    with pytest.raises(UnsupportedField):
        end_algebra(m)
    with pytest.raises(UnsupportedField):
        is_split_indecomposable(m)


def test_split_local_by_enumeration():
    F = GF(2)
    assert split_local_by_enumeration(jordan_module(Partition((3,)), F)) is True
    assert split_local_by_enumeration(jordan_module(Partition((2, 1)), F)) is False
    # a 2-dimensional simple module over F_2 (End is F_4): not split local
    assert split_local_by_enumeration(free_module([[[0, 1], [1, 1]]], F)) is False
    big = jordan_module(Partition((1, 1, 1, 1)), F)
    assert split_local_by_enumeration(big, limit=1000) is None


# -- radical homs, Fitting, isomorphism -------------------------------------------


def test_radical_hom_examples():
    M, _ = kronecker_pair()
    S2 = ModulePoint.of(kronecker_algebra(), [[[0]], [[1]], [[0]], [[0]]])
    socle = mat([[0], [1]])
    assert is_hom(socle, S2, M)
    assert is_radical_hom(socle, S2, M)
    assert is_radical_hom(Matrix.zeros(QQ, 2, 2), M, M)
    assert not is_radical_hom(M.identity(), M, M)
    with pytest.raises(ValueError):
        is_radical_hom(mat([[1], [0]]), S2, M)


def test_fitting_split_cases():
    m = direct_sum(jordan_module(Partition((2,)), QQ), jordan_module(Partition((1,)), QQ))
    top, bot, P = fitting_split(m.identity(), m)
    assert (top.d, bot.d) == (3, 0)
    nil = hom_space(m, m).basis
    n = next(b for b in nil if b.is_nilpotent() and not b.is_zero())
    top, bot, _ = fitting_split(n, m)
    assert top.d == 0
    e = Matrix.block_diag(Matrix.identity(QQ, 2), Matrix.zeros(QQ, 1, 1))
    top, bot, P = fitting_split(e, m)
    assert (top.d, bot.d) == (2, 1)
    conj = [P.inverse() @ a @ P for a in m.mats]
    assert conj[0] == Matrix.block_diag(top.mats[0], bot.mats[0])
    assert validate_module(top).ok and validate_module(bot).ok


def test_isomorphism():
    rng = random.Random(7)
    M, N = kronecker_pair()
    assert not is_isomorphic(M, N)
    assert is_isomorphic(M, M)
    for _ in range(10):
        _, m = random_small_module(rng)
        g = random_unimodular(QQ, m.d, rng)
        phi = find_isomorphism(m, m.conjugate(g))
        assert phi is not None and phi.is_invertible()
        assert is_hom(phi, m, m.conjugate(g))


# -- submodules and quotients ----------------------------------------------------


def test_submodule_and_quotient():
    M, _ = kronecker_pair()
    socle = mat([[0], [1]])
    U = submodule(M, socle)
    V, P, proj = quotient(M, socle)
    assert (U.d, V.d) == (1, 1)
    assert is_hom(socle, U, M) and is_hom(proj, M, V)
    assert (proj @ socle).is_zero()
    with pytest.raises(ValueError, match="not invariant"):
        submodule(M, mat([[1], [0]]))
    assert generated_submodule(M, [mat([[1], [0]])]).ncols == 2
