import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitreg import GF, QQ, Matrix
from orbitreg.algmod import ModulePoint, direct_sum, hom_dim, is_isomorphic
from orbitreg.cli import load_problem
from orbitreg.degen import (
    DegenerationCertificate,
    SelfExtensionDatum,
    ShortExactCandidate,
    certificate_from_submodule,
    certify_regularity,
    check_exact,
    check_split,
    codim1_identities,
    endo_pair,
    normalize_certificate,
    split_criteria,
    theorem2_gap,
    uniqueness_check,
)
from orbitreg.generators import codim_one_certificates, random_exact_sequence, random_unimodular
from orbitreg.report import FAIL, PASS, PRECONDITION, REGULAR, VIOLATION

from conftest import FIXTURES, kronecker_pair, mat, selfext_modules


@pytest.fixture(scope="module")
def kron():
    return load_problem(str(FIXTURES / "kronecker.json"))[0]


def selfext_datum(selfext, f=QQ):
    Z, Y = selfext_modules(selfext, f)
    maps = {k: Matrix(f, v) for k, v in selfext["maps"].items()}
    return SelfExtensionDatum(Z, Y, maps["ftilde"], maps["gtilde"], maps["htilde"])


def sympy_splits_f2(s: ShortExactCandidate) -> bool:
    """Is there a module map r: W -> U with r f = 1?  Linear system solved with sympy over GF(2)."""
    from sympy.polys.domains import GF as SGF
    from sympy.polys.matrices import DomainMatrix

    u, w = s.U.d, s.W.d
    ints = lambda m: [[int(x) for x in r] for r in m.tolist()]  # noqa: E731
    var = lambda i, j: i * w + j  # noqa: E731
    rows, rhs = [], []
    # r W_k - U_k r = 0
    for Uk, Wk in zip(map(ints, s.U.mats), map(ints, s.W.mats)):
        for i in range(u):
            for j in range(w):
                row = [0] * (u * w)
                for m in range(w):
                    row[var(i, m)] += Wk[m][j]
                for m in range(u):
                    row[var(m, j)] -= Uk[i][m]
                rows.append(row)
                rhs.append(0)
    f = ints(s.f)
    for i in range(u):
        for j in range(u):
            row = [0] * (u * w)
            for m in range(w):
                row[var(i, m)] += f[m][j]
            rows.append(row)
            rhs.append(int(i == j))
    K = SGF(2)
    A = DomainMatrix([[K(x) for x in r] for r in rows], (len(rows), u * w), K)
    Ab = DomainMatrix([[K(x) for x in r] + [K(b)] for r, b in zip(rows, rhs)], (len(rows), u * w + 1), K)
    return A.rank() == Ab.rank()


# -- exactness and splitting -------------------------------------------------------


def test_exactness_failures_are_named(kron):
    seq = kron.sequence("seq")
    assert check_exact(seq).ok
    bad = ShortExactCandidate(seq.U, seq.W, seq.V, seq.f.scale(0), seq.g)
    rep = check_exact(bad)
    assert rep.verdict == FAIL and "f not injective" in rep.details
    with pytest.raises(ValueError, match="shapes"):
        check_exact(ShortExactCandidate(seq.U, seq.W, seq.V, seq.g, seq.f))


def test_non_hom_map_rejected(kron):
    seq = kron.sequence("seq")
    with pytest.raises(ValueError, match="homomorphism"):
        check_exact(ShortExactCandidate(seq.U, seq.W, seq.V, mat([[1], [0]]), seq.g))


def test_kronecker_sequence_does_not_split(kron):
    seq = kron.sequence("seq")
    assert split_criteria(seq) == dict.fromkeys(("hom_criterion_source", "hom_criterion_target", "section"), False)
    assert check_split(seq) is False


def test_split_sequence_detected():
    M, N = kronecker_pair()
    W = direct_sum(M, N)
    f = Matrix.vstack(Matrix.identity(QQ, 2), Matrix.zeros(QQ, 2, 2))
    g = Matrix.hstack(Matrix.zeros(QQ, 2, 2), Matrix.identity(QQ, 2))
    assert check_split(ShortExactCandidate(M, W, N, f, g)) is True


def test_selfext_sequence_exact_and_nonsplit(selfext):
    seq = selfext_datum(selfext).sequence()
    assert check_exact(seq).ok
    assert check_split(seq) is False


def test_selfext_sequence_nonsplit_independent_f2(selfext):
    seq = selfext_datum(selfext, GF(2)).sequence()
    assert check_exact(seq).ok
    assert not sympy_splits_f2(seq)
    assert check_split(seq) is False


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_split_criteria_agree_on_random_sequences(seed):
    rng = random.Random(seed)
    s = random_exact_sequence(rng)
    if s is None:
        return
    assert check_exact(s).ok
    check_split(s)  # raises if the criteria disagree


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_split_verdict_matches_independent_solver_f2(seed):
    rng = random.Random(seed)
    s = random_exact_sequence(rng, GF(2))
    if s is None:
        return
    assert check_split(s) == sympy_splits_f2(s)


# -- codimension-one identities and certificates ------------------------------------


def test_codim1_identities_kronecker():
    M, N = kronecker_pair()
    rep = codim1_identities(M, N)
    assert rep.verdict == PASS
    assert rep.values == {"MM": 1, "MN": 1, "NM": 1, "NN": 2, "orbit_dim_M": 3, "orbit_dim_N": 2, "codim": 1}
    assert codim1_identities(M, M).verdict == FAIL


def test_kronecker_certificate_regular(kron):
    rep = certify_regularity(kron.certificate("kron"))
    assert rep.verdict == REGULAR
    for k, v in dict(NZ=1, MZ=0, ZM=1, ZN=1, ZplusM_M=2, ZplusM_N=2).items():
        assert rep.values[k] == v
    assert rep.values["Z_indecomposable"] == "yes"


def test_padded_certificate_needs_normalization(kron):
    c = kron.certificate("padded")
    rep = certify_regularity(c)
    assert rep.verdict == PRECONDITION
    assert "f not radical" in rep.details
    n = normalize_certificate(c)
    assert n.normalized and n.Z.d == 1
    assert check_exact(n.sequence()).ok
    assert certify_regularity(n).verdict == REGULAR
    assert is_isomorphic(n.Z, kron.module("Z"))


def test_normalization_is_idempotent(kron):
    c = normalize_certificate(kron.certificate("kron"))
    assert c.Z.d == 1
    again = normalize_certificate(c)
    assert again.f == c.f and again.g == c.g


def test_normalization_refuses_non_exact(kron):
    c = kron.certificate("kron")
    bad = DegenerationCertificate(c.M, c.N, c.Z, c.f.scale(0), c.g)
    with pytest.raises(ValueError):
        normalize_certificate(bad)


def test_certificate_from_submodule(kron):
    M = kron.module("M")
    c = certificate_from_submodule(M, kron.map("socle"))
    assert check_exact(c.sequence()).ok
    assert certify_regularity(c).verdict == REGULAR
    f1, f2, g1, g2 = c.blocks
    assert f1.is_zero() and f2 == kron.map("socle")


def test_generated_certificates_never_violate():
    rng = random.Random(11)
    n = 0
    for gc in codim_one_certificates(rng, 600):
        c = normalize_certificate(gc.certificate)
        assert check_exact(c.sequence()).ok
        assert certify_regularity(c).verdict != VIOLATION
        n += 1
    assert n > 0


# -- self-extensions ----------------------------------------------------------------


def test_selfext_datum_gap(selfext):
    rep = theorem2_gap(selfext_datum(selfext))
    assert rep.verdict == PASS
    assert rep.values["gap"] == 2 and (rep.values["ZZ"], rep.values["YY"]) == (6, 4)


def test_selfext_datum_relation_and_endo_pair(selfext):
    s = selfext_datum(selfext)
    assert s.maps_are_homs()
    assert s.htilde @ s.gtilde == s.ftilde @ s.ftilde
    x, y = endo_pair(s)
    assert x @ x @ x == y @ y


def test_selfext_datum_over_f2(selfext):
    rep = theorem2_gap(selfext_datum(selfext, GF(2)))
    assert rep.verdict == PASS and rep.values["gap"] == 2


def test_split_self_extension_is_precondition():
    # Z = Y = k[x]/x^2 with f~ = g~ = h~ = 1: the diagonal sequence, which splits
    from orbitreg.oracles import Partition, jordan_module

    Z = jordan_module(Partition((2,)), QQ)
    one = Matrix.identity(QQ, 2)
    s = SelfExtensionDatum(Z, Z, one, one, one)
    rep = theorem2_gap(s)
    assert rep.verdict == PRECONDITION and "sequence splits" in rep.details


def test_non_hom_datum_is_precondition(selfext):
    s = selfext_datum(selfext)
    bad = SelfExtensionDatum(s.Z, s.Y, s.ftilde, s.gtilde, Matrix.identity(QQ, 4).scale(2) + s.htilde)
    assert theorem2_gap(bad).verdict == PRECONDITION


def test_gap_invariant_under_base_change(selfext):
    s = selfext_datum(selfext)
    rng = random.Random(5)
    P = random_unimodular(QQ, 4, rng)
    Q = random_unimodular(QQ, 4, rng)
    # transport Z by P and Y by Q
    Z2, Y2 = s.Z.conjugate(P), s.Y.conjugate(Q)
    Pi, Qi = P.inverse(), Q.inverse()
    s2 = SelfExtensionDatum(Z2, Y2, P @ s.ftilde @ Pi, Q @ s.gtilde @ Pi, P @ s.htilde @ Qi)
    rep = theorem2_gap(s2)
    assert rep.verdict == PASS and rep.values["gap"] == 2


# -- uniqueness ---------------------------------------------------------------------


def test_uniqueness_of_kronecker_certificates(kron):
    assert uniqueness_check(kron.certificate("kron"), kron.certificate("kron2")).verdict == PASS
    assert uniqueness_check(kron.certificate("kron"), kron.certificate("kron")).verdict == PASS


def test_uniqueness_precondition_on_unnormalized(kron):
    assert uniqueness_check(kron.certificate("kron"), kron.certificate("padded")).verdict == PRECONDITION


def test_hom_dims_of_direct_sum_certificate_middle(kron):
    c = kron.certificate("kron")
    assert hom_dim(c.middle, c.M) == hom_dim(c.Z, c.M) + hom_dim(c.M, c.M)
    assert isinstance(c.middle, ModulePoint)


def test_codim_two_pair_fails_identities():
    from orbitreg.oracles import Partition, jordan_module

    J2 = jordan_module(Partition((2,)), QQ)
    zero = ModulePoint.of(J2.algebra, [Matrix.zeros(QQ, 2, 2)])
    rep = codim1_identities(J2, zero)
    assert rep.verdict == FAIL
    assert (rep.values["orbit_dim_M"], rep.values["orbit_dim_N"], rep.values["codim"]) == (2, 0, 2)
