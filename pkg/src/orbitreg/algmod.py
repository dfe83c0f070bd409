"""Finitely presented algebras, points of module varieties, Hom spaces.

A module point is a tuple of ``t`` square matrices (one per generator of the
algebra) acting on column vectors; a homomorphism ``phi: M -> N`` is a matrix
with ``phi @ M_i == N_i @ phi`` for every generator.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactfield import FieldSpec, Matrix, QQ, rref
from .report import FAIL, PASS, Report

__all__ = [
    "AlgebraPresentation",
    "ModulePoint",
    "HomSpace",
    "EndAlgebra",
    "Coordinates",
    "UnsupportedField",
    "hom_space",
    "hom_dim",
    "is_hom",
    "direct_sum",
    "orbit_dim",
    "end_algebra",
    "is_split_indecomposable",
    "split_local_by_enumeration",
    "is_radical_hom",
    "fitting_split",
    "find_isomorphism",
    "is_isomorphic",
    "submodule",
    "quotient",
    "generated_submodule",
    "validate_module",
]


class UnsupportedField(ValueError):
    """Raised for operations that need characteristic zero."""


@dataclass(frozen=True)
class AlgebraPresentation:
    """``k<X_1..X_t> / I`` with ``I`` generated by ``relations``.

    A relation is a tuple of ``(coefficient, word)`` terms; a word is a tuple of
    generator indices read left to right as a matrix product.  The empty word
    is the identity.
    """

    field: FieldSpec
    t: int
    relations: tuple = ()
    names: Optional[tuple] = None

    def __post_init__(self):
        rels = tuple(tuple((self.field(c), tuple(w)) for c, w in rel) for rel in self.relations)
        object.__setattr__(self, "relations", rels)
        for rel in rels:
            for _, w in rel:
                if any(not (0 <= i < self.t) for i in w):
                    raise ValueError(f"word {w} uses a generator index outside [0, {self.t})")
        if self.names is not None:
            if len(self.names) != self.t:
                raise ValueError("one name per generator expected")
            object.__setattr__(self, "names", tuple(self.names))

    @classmethod
    def free(cls, field: FieldSpec, t: int) -> "AlgebraPresentation":
        return cls(field, t, ())

    @classmethod
    def path_algebra(cls, field: FieldSpec, n_vertices: int, arrows: Sequence[tuple]) -> "AlgebraPresentation":
        """Path algebra of a quiver: generators are vertex idempotents then arrows.

        ``arrows`` lists ``(source, target)`` pairs.
        """
        n = n_vertices
        rels = []
        for i in range(n):
            rels.append(((1, (i, i)), (-1, (i,))))
            for j in range(n):
                if i != j:
                    rels.append(((1, (i, j)),))
        rels.append(tuple((1, (i,)) for i in range(n)) + ((-1, ()),))
        for k, (s, e) in enumerate(arrows):
            a = n + k
            rels.append(((1, (a,)), (-1, (a, s))))
            rels.append(((1, (a,)), (-1, (e, a))))
        names = tuple(f"e{i}" for i in range(n)) + tuple(f"a{k}" for k in range(len(arrows)))
        return cls(field, n + len(arrows), tuple(rels), names)

    def word_name(self, w) -> str:
        if not w:
            return "1"
        names = self.names or tuple(f"X{i}" for i in range(self.t))
        return "".join(names[i] for i in w)

    def relation_name(self, k: int) -> str:
        parts = []
        for c, w in self.relations[k]:
            parts.append(f"{self.field.format(c)}*{self.word_name(w)}")
        return " + ".join(parts)


@dataclass(frozen=True)
class ModulePoint:
    """A point of ``mod_A^d(k)``: one ``d x d`` matrix per generator."""

    algebra: AlgebraPresentation
    mats: tuple
    d: int

    def __post_init__(self):
        object.__setattr__(self, "mats", tuple(self.mats))
        if len(self.mats) != self.algebra.t:
            raise ValueError(f"expected {self.algebra.t} matrices, got {len(self.mats)}")
        for m in self.mats:
            if m.shape != (self.d, self.d):
                raise ValueError(f"matrix of shape {m.shape} in a module of dimension {self.d}")
            if m.field != self.algebra.field:
                raise ValueError("matrix field differs from the algebra field")

    @classmethod
    def of(cls, algebra: AlgebraPresentation, mats: Sequence, d: Optional[int] = None) -> "ModulePoint":
        f = algebra.field
        ms = tuple(m if isinstance(m, Matrix) else Matrix(f, m) for m in mats)
        if d is None:
            if not ms:
                raise ValueError("dimension needed when the algebra has no generators")
            d = ms[0].nrows
        return cls(algebra, ms, d)

    @classmethod
    def zero(cls, algebra: AlgebraPresentation) -> "ModulePoint":
        z = Matrix.zeros(algebra.field, 0, 0)
        return cls(algebra, (z,) * algebra.t, 0)

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    def evaluate(self, word) -> Matrix:
        out = Matrix.identity(self.field, self.d)
        for i in word:
            out = out @ self.mats[i]
        return out

    def evaluate_relation(self, k: int) -> Matrix:
        acc = Matrix.zeros(self.field, self.d, self.d)
        for c, w in self.algebra.relations[k]:
            acc = acc + self.evaluate(w).scale(c)
        return acc

    def conjugate(self, g: Matrix) -> "ModulePoint":
        """``g * M``: the point ``(g m_1 g^-1, ..., g m_t g^-1)``."""
        gi = g.inverse()
        if gi is None:
            raise ValueError("conjugating matrix is singular")
        return ModulePoint(self.algebra, tuple(g @ m @ gi for m in self.mats), self.d)

    def identity(self) -> Matrix:
        return Matrix.identity(self.field, self.d)


def validate_module(m: ModulePoint) -> Report:
    for k in range(len(m.algebra.relations)):
        if not m.evaluate_relation(k).is_zero():
            return Report(FAIL, {"failing_relation": k},
                          [f"relation {k} ({m.algebra.relation_name(k)}) does not vanish"])
    return Report(PASS, {"relations_checked": len(m.algebra.relations)})


def _same_algebra(m: ModulePoint, n: ModulePoint):
    if m.algebra != n.algebra:
        raise ValueError("modules over different algebras")


def is_hom(phi: Matrix, m: ModulePoint, n: ModulePoint) -> bool:
    if phi.shape != (n.d, m.d):
        return False
    return all(phi @ a == b @ phi for a, b in zip(m.mats, n.mats))


@dataclass(frozen=True)
class HomSpace:
    source: ModulePoint
    target: ModulePoint
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def combination(self, coeffs) -> Matrix:
        f = self.source.field
        acc = Matrix.zeros(f, self.target.d, self.source.d)
        for c, b in zip(coeffs, self.basis):
            if c:
                acc = acc + b.scale(c)
        return acc


def _commutation_rows(m: ModulePoint, n: ModulePoint) -> list:
    dm, dn = m.d, n.d
    size = dn * dm
    rows = []
    for A, B in zip(m.mats, n.mats):
        Ar, Br = A.rows, B.rows
        for a in range(dn):
            for b in range(dm):
                row = [0] * size
                # (phi A)[a][b] = sum_c phi[a][c] A[c][b]
                for c in range(dm):
                    x = Ar[c][b]
                    if x:
                        row[a * dm + c] += x
                # (B phi)[a][b] = sum_c B[a][c] phi[c][b]
                for c in range(dn):
                    x = Br[a][c]
                    if x:
                        row[c * dm + b] -= x
                if any(row):
                    rows.append(row)
    return rows


@functools.lru_cache(maxsize=8192)
def hom_space(m: ModulePoint, n: ModulePoint) -> HomSpace:
    """Basis of ``Hom_A(m, n)`` as the kernel of the vectorized commutation system."""
    _same_algebra(m, n)
    f = m.field
    dm, dn = m.d, n.d
    size = dm * dn
    if size == 0:
        return HomSpace(m, n, ())
    rows = _commutation_rows(m, n)
    if rows:
        kernel = Matrix._make(f, rows, size).nullspace()
    else:
        kernel = [Matrix.unit(f, size, 1, i, 0) for i in range(size)]
    basis = tuple(
        Matrix._make(f, [[v.rows[a * dm + b][0] for b in range(dm)] for a in range(dn)], dm) for v in kernel
    )
    return HomSpace(m, n, basis)


def hom_dim(m: ModulePoint, n: ModulePoint) -> int:
    """``[m, n] = dim_k Hom_A(m, n)``."""
    return hom_space(m, n).dim


def direct_sum(*mods: ModulePoint) -> ModulePoint:
    alg = mods[0].algebra
    for x in mods[1:]:
        _same_algebra(mods[0], x)
    d = sum(x.d for x in mods)
    if d == 0:
        return ModulePoint.zero(alg)
    nonzero = [x for x in mods if x.d]
    mats = tuple(Matrix.block_diag(*[x.mats[i] for x in nonzero]) for i in range(alg.t))
    return ModulePoint(alg, mats, d)


def orbit_dim(m: ModulePoint) -> int:
    """``dim O_M = d^2 - [M, M]``."""
    return m.d * m.d - hom_dim(m, m)


class Coordinates:
    """Expresses matrices in a fixed linearly independent list of same-shape matrices."""

    def __init__(self, basis: Sequence[Matrix]):
        self.basis = tuple(basis)
        self.n = len(self.basis)
        if not self.n:
            self._inv = None
            self._idx = []
            return
        f = self.basis[0].field
        vecs = [b.entries for b in self.basis]
        _, piv = rref(f, vecs, len(vecs[0]), full=False)
        if len(piv) != self.n:
            raise ValueError("basis is linearly dependent")
        self._idx = piv
        S = Matrix(f, [[v[i] for v in vecs] for i in piv])
        self._inv = S.inverse()
        self._field = f

    def coords(self, x: Matrix) -> Optional[list]:
        """Coordinates of ``x`` or None when ``x`` is outside the span."""
        if not self.n:
            return [] if x.is_zero() else None
        e = x.entries
        rhs = Matrix(self._field, [[e[i]] for i in self._idx])
        c = [r[0] for r in (self._inv @ rhs).rows]
        if self.combine(c) != x:
            return None
        return c

    def combine(self, c) -> Matrix:
        b0 = self.basis[0]
        acc = Matrix.zeros(b0.field, *b0.shape)
        for ci, b in zip(c, self.basis):
            if ci:
                acc = acc + b.scale(ci)
        return acc


@dataclass(frozen=True)
class EndAlgebra:
    module: ModulePoint
    basis: tuple
    structure_constants: tuple  # c[i][j][k]: b_i b_j = sum_k c[i][j][k] b_k
    radical_coords: tuple  # coordinate vectors spanning rad(End)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @functools.cached_property
    def coordinates(self) -> Coordinates:
        return Coordinates(self.basis)

    @functools.cached_property
    def radical_basis(self) -> tuple:
        return tuple(self.coordinates.combine(c) for c in self.radical_coords)

    @functools.cached_property
    def _radical_coordinates(self) -> Coordinates:
        return Coordinates(self.radical_basis)

    @property
    def radical_dim(self) -> int:
        return len(self.radical_coords)

    def in_radical(self, e: Matrix) -> bool:
        return self._radical_coordinates.coords(e) is not None


@functools.lru_cache(maxsize=1024)
def end_algebra(m: ModulePoint) -> EndAlgebra:
    """Endomorphism algebra with structure constants and Jacobson radical.

    The radical is the kernel of the trace form ``(x, y) -> tr L_{xy}`` of the
    left-regular representation, which is exact in characteristic zero only.
    """
    if m.field.is_prime:
        raise UnsupportedField("radical via the trace form needs characteristic 0")
    H = hom_space(m, m)
    basis = H.basis
    n = len(basis)
    co = Coordinates(basis)
    sc = []
    for bi in basis:
        row = []
        for bj in basis:
            c = co.coords(bi @ bj)
            if c is None:
                raise ArithmeticError("End basis is not closed under composition")
            row.append(tuple(c))
        sc.append(tuple(row))
    traces = [sum(sc[k][l][l] for l in range(n)) for k in range(n)]
    gram = [[sum(sc[i][j][k] * traces[k] for k in range(n)) for j in range(n)] for i in range(n)]
    if n:
        rad = Matrix(m.field, gram).T.nullspace()
        rad_coords = tuple(tuple(v.entries) for v in rad)
    else:
        rad_coords = ()
    return EndAlgebra(m, basis, tuple(sc), rad_coords)


def _charpoly(a: Matrix) -> list:
    # Faddeev-LeVerrier, char 0; coefficients from leading to constant
    n = a.nrows
    coeffs = [Fraction(1)]
    Mk = Matrix.zeros(a.field, n, n)
    I = Matrix.identity(a.field, n)
    c = Fraction(1)
    for k in range(1, n + 1):
        Mk = a @ Mk + I.scale(c)
        c = -Fraction((a @ Mk).trace()) / k
        coeffs.append(c)
    return coeffs


def _distinct_irreducible_factors(coeffs) -> int:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    _, factors = poly.factor_list()
    return len(factors)


def _end_candidates(basis, seed=0, n_random=48):
    yield from basis
    for a, b in itertools.combinations(basis, 2):
        yield a + b
        yield a + b.scale(2)
    rng = random.Random(seed)
    for _ in range(n_random):
        acc = Matrix.zeros(basis[0].field, *basis[0].shape)
        for b in basis:
            acc = acc + b.scale(rng.randint(-3, 3))
        yield acc


def is_split_indecomposable(m: ModulePoint) -> str:
    """``"yes"`` if End is local with residue field k, ``"no"`` if decomposable.

    Over Q the quotient End/rad may be a division algebra bigger than Q; then
    the answer is ``"inconclusive"`` unless a zero divisor is exhibited.
    """
    if m.field.is_prime:
        raise UnsupportedField("use split_local_by_enumeration over prime fields")
    if m.d == 0:
        return "no"
    E = end_algebra(m)
    semisimple_dim = E.dim - E.radical_dim
    if semisimple_dim == 1:
        return "yes"
    # an endomorphism whose characteristic polynomial has two coprime factors
    # yields a nontrivial Fitting decomposition
    for e in _end_candidates(E.basis):
        if _distinct_irreducible_factors(_charpoly(e)) > 1:
            return "no"
    return "inconclusive"


def split_local_by_enumeration(m: ModulePoint, limit: int = 4096) -> Optional[bool]:
    """Over F_p: is every endomorphism a scalar plus a nilpotent?

    Enumerates all of End (``p^[M,M]`` elements); returns None when that
    exceeds ``limit``.  True means End is local with residue field F_p.
    """
    f = m.field
    if not f.is_prime:
        raise UnsupportedField("enumeration is for prime fields")
    if m.d == 0:
        return False
    basis = hom_space(m, m).basis
    if f.p ** len(basis) > limit:
        return None
    I = m.identity()
    scalars = [I.scale(lam) for lam in range(f.p)]
    for coeffs in itertools.product(range(f.p), repeat=len(basis)):
        e = Matrix.zeros(f, m.d, m.d)
        for c, b in zip(coeffs, basis):
            if c:
                e = e + b.scale(c)
        if not any((e - s).is_nilpotent() for s in scalars):
            return False
    return True


def is_radical_hom(f: Matrix, src: ModulePoint, tgt: ModulePoint) -> bool:
    """True iff ``g f`` lies in rad End(src) for every ``g`` in Hom(tgt, src)."""
    if not is_hom(f, src, tgt):
        raise ValueError("not a homomorphism")
    if src.d == 0 or f.is_zero():
        return True
    E = end_algebra(src)
    return all(E.in_radical(g @ f) for g in hom_space(tgt, src).basis)


def fitting_split(e: Matrix, m: ModulePoint):
    """Fitting decomposition along ``e``: (image part, kernel part, base change P).

    ``P = [basis of im e^d | basis of ker e^d]`` and ``P^-1 m P`` is block
    diagonal with the two parts as blocks.
    """
    if not is_hom(e, m, m):
        raise ValueError("not an endomorphism")
    f = m.field
    ed = e ** m.d
    im = ed.column_space_basis()
    ker = ed.nullspace()
    P = Matrix.hstack(im, *ker) if ker else im
    if m.d == 0:
        z = ModulePoint.zero(m.algebra)
        return z, z, Matrix.zeros(f, 0, 0)
    Pi = P.inverse()
    r = im.ncols
    rest = m.d - r
    mats = [Pi @ a @ P for a in m.mats]
    top = ModulePoint(m.algebra, tuple(x.submatrix(range(r), range(r)) for x in mats), r)
    bot = ModulePoint(m.algebra, tuple(x.submatrix(range(r, m.d), range(r, m.d)) for x in mats), rest)
    return top, bot, P


# -- isomorphism ----------------------------------------------------------------

_N_RANDOM_TRIES = 8


def _iso_candidates(H: HomSpace, d: int):
    f = H.source.field
    n = H.dim
    rng = random.Random(0)
    for _ in range(_N_RANDOM_TRIES):
        if f.is_prime:
            yield [rng.randrange(f.p) for _ in range(n)]
        else:
            yield [rng.randint(-2, 2) for _ in range(n)]
    # fallback evaluation points for the determinant polynomial on Hom
    wide = random.Random(0x5EED)
    bound = max(4, 2 * d * n)
    for _ in range(2 * d * n):
        if f.is_prime:
            yield [wide.randrange(f.p) for _ in range(n)]
        else:
            yield [wide.randint(-bound, bound) for _ in range(n)]


def find_isomorphism(m: ModulePoint, n: ModulePoint) -> Optional[Matrix]:
    """An invertible element of Hom(m, n), or None if none was found."""
    _same_algebra(m, n)
    if m.d != n.d:
        return None
    if m.d == 0:
        return Matrix.zeros(m.field, 0, 0)
    H = hom_space(m, n)
    if H.dim != hom_dim(m, m) or H.dim == 0:
        return None
    for coeffs in _iso_candidates(H, m.d):
        phi = H.combination(coeffs)
        if phi.is_invertible():
            return phi
    return None


def is_isomorphic(m: ModulePoint, n: ModulePoint) -> bool:
    return find_isomorphism(m, n) is not None


# -- submodules and quotients -------------------------------------------------------


def submodule(m: ModulePoint, basis: Matrix) -> ModulePoint:
    """Restriction of ``m`` to the invariant subspace spanned by the columns of ``basis``."""
    if basis.nrows != m.d:
        raise ValueError("basis rows must equal the module dimension")
    if basis.rank() != basis.ncols:
        raise ValueError("basis columns are dependent")
    r = basis.ncols
    if r == 0:
        return ModulePoint.zero(m.algebra)
    mats = []
    for i, a in enumerate(m.mats):
        x = basis.solve(a @ basis)
        if x is None:
            raise ValueError(f"subspace is not invariant under generator {i}")
        mats.append(x)
    return ModulePoint(m.algebra, tuple(mats), r)


def complete_basis(basis: Matrix) -> Matrix:
    """Extend independent columns to an invertible matrix with unit vectors."""
    f = basis.field
    d = basis.nrows
    cols = [list(basis.col(j).entries) for j in range(basis.ncols)]
    current = basis
    for i in range(d):
        if len(cols) == d:
            break
        e = [0] * d
        e[i] = 1
        trial = Matrix.from_columns(f, cols + [e], d)
        if trial.rank() == len(cols) + 1:
            cols.append(e)
            current = trial
    return current if current.ncols == d else Matrix.from_columns(f, cols, d)


def quotient(m: ModulePoint, basis: Matrix):
    """Quotient by an invariant subspace.

    Returns ``(V, P, proj)`` with ``P = [basis | complement]`` and
    ``proj`` the matrix of the canonical surjection ``m -> V``.
    """
    r = basis.ncols
    P = complete_basis(basis) if r else Matrix.identity(m.field, m.d)
    Pi = P.inverse()
    rest = m.d - r
    if rest == 0:
        return ModulePoint.zero(m.algebra), P, Matrix.zeros(m.field, 0, m.d)
    mats = []
    for i, a in enumerate(m.mats):
        x = Pi @ a @ P
        if not x.submatrix(range(r, m.d), range(r)).is_zero():
            raise ValueError(f"subspace is not invariant under generator {i}")
        mats.append(x.submatrix(range(r, m.d), range(r, m.d)))
    proj = Pi.submatrix(range(r, m.d), range(m.d))
    return ModulePoint(m.algebra, tuple(mats), rest), P, proj


def generated_submodule(m: ModulePoint, vectors: Sequence[Matrix]) -> Matrix:
    """Column basis of the smallest invariant subspace containing ``vectors``."""
    f = m.field
    if not vectors:
        return Matrix.zeros(f, m.d, 0)
    span = Matrix.hstack(*vectors).column_space_basis()
    while True:
        imgs = [a @ span for a in m.mats]
        bigger = Matrix.hstack(span, *imgs).column_space_basis() if imgs else span
        if bigger.ncols == span.ncols:
            return span
        span = bigger
