"""Short exact sequences, degeneration certificates and the codimension-one checks.

A degeneration certificate is an exact sequence ``0 -> Z -f-> Z+M -g-> N -> 0``;
it witnesses that ``N`` lies in the orbit closure of ``M``.  When the orbit of
``N`` has codimension one, :func:`certify_regularity` checks the Hom identities
that make the orbit closure regular at ``N``, and :func:`theorem2_gap` checks
the endomorphism gap for self-extensions ``0 -> Z -> Z+Y -> Z -> 0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Optional

from .algmod import (
    ModulePoint,
    UnsupportedField,
    direct_sum,
    find_isomorphism,
    fitting_split,
    hom_dim,
    hom_space,
    is_hom,
    is_radical_hom,
    is_split_indecomposable,
    orbit_dim,
    quotient,
    split_local_by_enumeration,
    submodule,
)
from .exactfield import Matrix
from .report import FAIL, PASS, PRECONDITION, REGULAR, VIOLATION, Report


class SplitCriteriaDisagree(AssertionError):
    """The equivalent splitting criteria gave different answers (a bug)."""


@dataclass(frozen=True)
class ShortExactCandidate:
    """``0 -> U -f-> W -g-> V -> 0`` (exactness checked on demand)."""

    U: ModulePoint
    W: ModulePoint
    V: ModulePoint
    f: Matrix
    g: Matrix


def check_exact(s: ShortExactCandidate) -> Report:
    if s.f.shape != (s.W.d, s.U.d) or s.g.shape != (s.V.d, s.W.d):
        raise ValueError(f"map shapes {s.f.shape}, {s.g.shape} do not fit dims {s.U.d}, {s.W.d}, {s.V.d}")
    if not is_hom(s.f, s.U, s.W):
        raise ValueError("f is not a homomorphism")
    if not is_hom(s.g, s.W, s.V):
        raise ValueError("g is not a homomorphism")
    rf, rg = s.f.rank(), s.g.rank()
    values = {"rank_f": rf, "rank_g": rg, "dim_U": s.U.d, "dim_W": s.W.d, "dim_V": s.V.d}
    reasons = []
    if not (s.g @ s.f).is_zero():
        reasons.append("composition nonzero")
    if rf != s.U.d:
        reasons.append("f not injective")
    if rg != s.V.d:
        reasons.append("g not surjective")
    if rf + rg != s.W.d:
        reasons.append("im f != ker g")
    return Report(FAIL if reasons else PASS, values, reasons)


def _solve_coefficients(columns, rhs: Matrix) -> Optional[Matrix]:
    f = rhs.field
    target = Matrix(f, [[x] for x in rhs.entries])
    if not columns:
        return Matrix.zeros(f, 0, 1) if rhs.is_zero() else None
    A = Matrix.from_columns(f, [c.entries for c in columns], len(rhs.entries))
    return A.solve(target)


def factors_through_left(u: Matrix, f: Matrix, W: ModulePoint, X: ModulePoint) -> bool:
    """Does ``u: U -> X`` factor as ``h f`` with ``f: U -> W`` and ``h`` in Hom(W, X)?"""
    if u.ncols != f.ncols:
        raise ValueError("u and f must share their source")
    if u.nrows != X.d or f.nrows != W.d:
        raise ValueError("shape mismatch with the given modules")
    return _solve_coefficients([h @ f for h in hom_space(W, X).basis], u) is not None


def factors_through_right(u: Matrix, g: Matrix, X: ModulePoint, W: ModulePoint) -> bool:
    """Does ``u: X -> V`` factor as ``g h`` with ``g: W -> V`` and ``h`` in Hom(X, W)?"""
    if u.nrows != g.nrows:
        raise ValueError("u and g must share their target")
    return _solve_coefficients([g @ h for h in hom_space(X, W).basis], u) is not None


def split_criteria(s: ShortExactCandidate) -> dict:
    U, W, V = s.U, s.W, s.V
    return {
        "hom_criterion_source": hom_dim(U, U) + hom_dim(V, U) == hom_dim(W, U),
        "hom_criterion_target": hom_dim(V, U) + hom_dim(V, V) == hom_dim(V, W),
        "section": factors_through_left(U.identity(), s.f, W, U),
    }


def check_split(s: ShortExactCandidate) -> bool:
    """Whether an exact sequence splits, by three criteria that must agree."""
    crit = split_criteria(s)
    verdicts = set(crit.values())
    if len(verdicts) != 1:
        raise SplitCriteriaDisagree(f"splitting criteria disagree: {crit}")
    return verdicts.pop()


# -- degeneration certificates ------------------------------------------------


@dataclass(frozen=True)
class DegenerationCertificate:
    """``0 -> Z -f-> Z+M -g-> N -> 0``; ``dual`` optionally holds ``(T, f', g')``
    for ``0 -> N -f'-> T+M -g'-> T -> 0``."""

    M: ModulePoint
    N: ModulePoint
    Z: ModulePoint
    f: Matrix
    g: Matrix
    normalized: bool = False
    dual: Optional[tuple] = None

    @property
    def middle(self) -> ModulePoint:
        return direct_sum(self.Z, self.M)

    def sequence(self) -> ShortExactCandidate:
        return ShortExactCandidate(self.Z, self.middle, self.N, self.f, self.g)

    def dual_sequence(self) -> Optional[ShortExactCandidate]:
        if self.dual is None:
            return None
        T, fp, gp = self.dual
        return ShortExactCandidate(self.N, direct_sum(T, self.M), T, fp, gp)

    @property
    def blocks(self):
        """``(f1, f2, g1, g2)`` with ``f = (f1; f2)`` and ``g = (g1, g2)``."""
        e, d = self.Z.d, self.M.d
        f1 = self.f.submatrix(range(e), range(e))
        f2 = self.f.submatrix(range(e, e + d), range(e))
        g1 = self.g.submatrix(range(self.N.d), range(e))
        g2 = self.g.submatrix(range(self.N.d), range(e, e + d))
        return f1, f2, g1, g2


def certificate_from_submodule(m: ModulePoint, basis_u: Matrix) -> DegenerationCertificate:
    """Certificate for ``M -> U + M/U`` from an invariant subspace ``U``.

    Uses ``Z = U``, ``f = (0; inclusion)`` and ``g = 1_U + projection``.
    """
    U = submodule(m, basis_u)
    V, _, proj = quotient(m, basis_u)
    fld = m.field
    du = U.d
    N = direct_sum(U, V)
    f = Matrix.vstack(Matrix.zeros(fld, du, du), basis_u)
    g = Matrix.block_diag(Matrix.identity(fld, du), proj) if du else proj
    if not du:
        f = Matrix.zeros(fld, m.d, 0)
    return DegenerationCertificate(m, N, U, f, g)


def _non_nilpotent_composite(c: DegenerationCertificate, X: ModulePoint) -> Matrix:
    basis = hom_space(X, c.Z).basis
    for phi in basis:
        e = phi @ c.f
        if not e.is_nilpotent():
            return phi
    # a left ideal of End(Z) outside the radical holds a non-nilpotent element
    rng = random.Random(0)
    for _ in range(64):
        phi = Matrix.zeros(c.f.field, c.Z.d, X.d)
        for b in basis:
            phi = phi + b.scale(rng.randint(-3, 3))
        if not (phi @ c.f).is_nilpotent():
            return phi
    raise ArithmeticError("f is not radical but no non-nilpotent composite was found")


def normalize_certificate(c: DegenerationCertificate) -> DegenerationCertificate:
    """Split off the summands of Z on which f is a section, until f is radical."""
    if c.M.field.is_prime:
        raise UnsupportedField("normalization needs the characteristic-zero radical")
    if not check_exact(c.sequence()).ok:
        raise ValueError("certificate is not exact")
    fld = c.M.field
    while True:
        X = c.middle
        if c.Z.d == 0 or is_radical_hom(c.f, c.Z, X):
            return replace(c, normalized=True)
        phi = _non_nilpotent_composite(c, X)
        e = phi @ c.f
        top, bot, P = fitting_split(e, c.Z)
        r = top.d
        Pi = P.inverse()
        fP = c.f @ P
        f_top = fP.submatrix(range(X.d), range(r))
        f_bot = fP.submatrix(range(X.d), range(r, c.Z.d))
        e_top = (Pi @ e @ P).submatrix(range(r), range(r))
        phi_top = (Pi @ phi).submatrix(range(r), range(X.d))
        rho = e_top.inverse() @ phi_top  # retraction of f_top
        K = Matrix.hstack(*rho.nullspace()) if X.d > r else Matrix.zeros(fld, X.d, 0)
        Kmod = submodule(X, K)
        proj_K = X.identity() - f_top @ rho
        y = K.solve(proj_K @ f_bot)
        target = direct_sum(bot, c.M)
        psi = find_isomorphism(Kmod, target)
        if psi is None:
            raise ArithmeticError("complement is not isomorphic to the expected Z'' + M")
        f_new = psi @ y
        g_new = c.g @ K @ psi.inverse()
        c = DegenerationCertificate(c.M, c.N, bot, f_new, g_new, False, c.dual)


def codim1_identities(M: ModulePoint, N: ModulePoint) -> Report:
    if M.algebra != N.algebra or M.d != N.d:
        return Report(PRECONDITION, {}, ["modules must share algebra and dimension"])
    mm, mn, nm, nn = hom_dim(M, M), hom_dim(M, N), hom_dim(N, M), hom_dim(N, N)
    om, on = orbit_dim(M), orbit_dim(N)
    values = {"MM": mm, "MN": mn, "NM": nm, "NN": nn, "orbit_dim_M": om, "orbit_dim_N": on, "codim": om - on}
    broken = []
    if om - on != 1:
        broken.append(f"codim != 1 (codim = {om - on})")
    if mn != mm:
        broken.append("[M,N] != [M,M]")
    if nm != mm:
        broken.append("[N,M] != [M,M]")
    if nn - 1 != mm:
        broken.append("[N,N] - 1 != [M,M]")
    return Report(FAIL if broken else PASS, values, broken)


def _indecomposability(Z: ModulePoint) -> str:
    if Z.field.is_prime:
        ans = split_local_by_enumeration(Z)
        return "inconclusive" if ans is None else ("yes" if ans else "no")
    return is_split_indecomposable(Z)


def certify_regularity(c: DegenerationCertificate) -> Report:
    """Verify the Hom identities behind regularity of the orbit closure of M at N."""
    pre = []
    values = {}
    ex = check_exact(c.sequence())
    if not ex.ok:
        pre.append("sequence not exact: " + ", ".join(ex.details))
    if c.dual is not None:
        dx = check_exact(c.dual_sequence())
        values["dual_exact"] = dx.ok
        if not dx.ok:
            pre.append("dual sequence not exact")
    co = codim1_identities(c.M, c.N)
    values.update(co.values)
    if not co.ok:
        pre.extend(co.details)
    try:
        if not is_radical_hom(c.f, c.Z, c.middle):
            pre.append("f not radical")
    except UnsupportedField:
        pre.append("radical test unsupported over a prime field")
    ind = _indecomposability(c.Z)
    values["Z_indecomposable"] = ind
    if ind != "yes":
        pre.append(f"Z not split indecomposable ({ind})")
    if pre:
        return Report(PRECONDITION, values, pre)

    Z, M, N = c.Z, c.M, c.N
    ZM = c.middle
    values.update(
        NZ=hom_dim(N, Z), MZ=hom_dim(M, Z), ZM=hom_dim(Z, M), ZN=hom_dim(Z, N),
        ZplusM_M=hom_dim(ZM, M), ZplusM_N=hom_dim(ZM, N),
    )
    broken = []
    if values["NZ"] != values["MZ"] + 1:
        broken.append("[N,Z] != [M,Z] + 1")
    if values["ZM"] != values["ZN"]:
        broken.append("[Z,M] != [Z,N]")
    if values["ZplusM_M"] != values["ZplusM_N"]:
        broken.append("[Z+M,M] != [Z+M,N]")
    if broken:
        return Report(VIOLATION, values, broken)
    return Report(REGULAR, values, [])


# -- self-extensions -----------------------------------------------------------


@dataclass(frozen=True)
class SelfExtensionDatum:
    """``0 -> Z -(f~; g~)-> Z+Y -(f~, -h~)-> Z -> 0``."""

    Z: ModulePoint
    Y: ModulePoint
    ftilde: Matrix
    gtilde: Matrix
    htilde: Matrix

    def sequence(self) -> ShortExactCandidate:
        return ShortExactCandidate(
            self.Z,
            direct_sum(self.Z, self.Y),
            self.Z,
            Matrix.vstack(self.ftilde, self.gtilde),
            Matrix.hstack(self.ftilde, -self.htilde),
        )

    def maps_are_homs(self) -> bool:
        return (
            is_hom(self.ftilde, self.Z, self.Z)
            and is_hom(self.gtilde, self.Z, self.Y)
            and is_hom(self.htilde, self.Y, self.Z)
        )


def theorem2_gap(s: SelfExtensionDatum) -> Report:
    """``[Z,Z] - [Y,Y]`` for a nonsplit self-extension with Z indecomposable; must be >= 2."""
    pre = []
    if s.Z.d != s.Y.d:
        pre.append("dim Y != dim Z")
    if not s.maps_are_homs():
        return Report(PRECONDITION, {}, pre + ["maps are not homomorphisms"])
    seq = s.sequence()
    ex = check_exact(seq)
    if not ex.ok:
        return Report(PRECONDITION, {}, pre + ["sequence not exact: " + ", ".join(ex.details)])
    if check_split(seq):
        pre.append("sequence splits")
    ind = _indecomposability(s.Z)
    if ind != "yes":
        pre.append(f"Z not split indecomposable ({ind})")
    Z, Y = s.Z, s.Y
    values = {"ZZ": hom_dim(Z, Z), "YY": hom_dim(Y, Y), "YZ": hom_dim(Y, Z), "ZY": hom_dim(Z, Y)}
    values["gap"] = values["ZZ"] - values["YY"]
    if pre:
        return Report(PRECONDITION, values, pre)
    if values["gap"] < 2:
        return Report(VIOLATION, values, [f"gap {values['gap']} < 2"])
    return Report(PASS, values, [])


def endo_pair(s: SelfExtensionDatum):
    """``x = g~ h~`` and ``y = g~ f~ h~`` in End(Y); checks ``xy = yx`` and ``x^3 = y^2``."""
    x = s.gtilde @ s.htilde
    y = s.gtilde @ s.ftilde @ s.htilde
    if not (is_hom(x, s.Y, s.Y) and is_hom(y, s.Y, s.Y)):
        raise ArithmeticError("x or y is not an endomorphism of Y")
    if x @ y != y @ x:
        raise ArithmeticError("xy != yx")
    if x @ x @ x != y @ y:
        raise ArithmeticError("x^3 != y^2")
    return x, y


# -- uniqueness --------------------------------------------------------------


def _vec_column(m: Matrix) -> list:
    return list(m.entries)


def uniqueness_check(c1: DegenerationCertificate, c2: DegenerationCertificate) -> Report:
    """Search for isomorphisms (i, j) with ``j f1 = f2 i`` and ``g2 j = g1``."""
    if c1.M != c2.M or c1.N != c2.N:
        return Report(PRECONDITION, {}, ["certificates have different M or N"])
    pre = []
    for name, c in (("first", c1), ("second", c2)):
        r = certify_regularity(c)
        if r.verdict != REGULAR:
            pre.append(f"{name} certificate: {r.verdict} {r.details}")
    if pre:
        return Report(PRECONDITION, {}, pre)
    fld = c1.M.field
    if find_isomorphism(c1.Z, c2.Z) is None:
        return Report(VIOLATION, {"dim_Z1": c1.Z.d, "dim_Z2": c2.Z.d}, ["Z1 and Z2 not isomorphic"])
    X1, X2 = c1.middle, c2.middle
    Hi = hom_space(c1.Z, c2.Z).basis
    Hj = hom_space(X1, X2).basis
    n_f = X2.d * c1.Z.d
    n_g = c1.N.d * X1.d
    cols = []
    for b in Hi:
        cols.append(_vec_column(-(c2.f @ b)) + [0] * n_g)
    for h in Hj:
        cols.append(_vec_column(h @ c1.f) + _vec_column(c2.g @ h))
    rhs = Matrix(fld, [[0]] * n_f + [[x] for x in c1.g.entries])
    A = Matrix.from_columns(fld, cols, n_f + n_g)
    part = A.solve(rhs)
    if part is None:
        return Report(VIOLATION, {}, ["no pair (i, j) satisfies the commutativity equations"])
    kernel = A.nullspace()
    rng = random.Random(0)
    k = len(Hi)

    def split(v):
        coeffs = [r[0] for r in v.rows]
        i = Matrix.zeros(fld, c2.Z.d, c1.Z.d)
        for cf, b in zip(coeffs[:k], Hi):
            if cf:
                i = i + b.scale(cf)
        j = Matrix.zeros(fld, X2.d, X1.d)
        for cf, h in zip(coeffs[k:], Hj):
            if cf:
                j = j + h.scale(cf)
        return i, j

    tries = 8 + 2 * X1.d * max(1, len(kernel))
    for t in range(tries):
        v = part
        for kv in kernel:
            c = rng.randint(-2, 2) if t < 8 else rng.randint(-4 * X1.d, 4 * X1.d)
            if c:
                v = v + kv.scale(c)
        i, j = split(v)
        if i.is_invertible() and j.is_invertible():
            return Report(PASS, {"dim_Z": c1.Z.d, "solution_space_dim": len(kernel),
                                 "i": i.tolist(), "j": j.tolist()}, ["equivalent"])
    return Report(VIOLATION, {"solution_space_dim": len(kernel)}, ["no invertible pair (i, j) found"])
