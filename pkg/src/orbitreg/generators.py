"""Seeded random instances for the property suites.

Nothing here decides anything; generators only build inputs, and every caller
re-checks what it needs (exactness, codimension, bimodule relations).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .algmod import (
    AlgebraPresentation,
    ModulePoint,
    direct_sum,
    generated_submodule,
    orbit_dim,
    quotient,
    submodule,
)
from .cusp import CuspBimodule, CuspModule, restrict_bimodule
from .degen import DegenerationCertificate, ShortExactCandidate, certificate_from_submodule
from .exactfield import QQ, FieldSpec, Matrix

# small quivers: (name, vertices, arrows)
QUIVERS = (
    ("A2", 2, ((0, 1),)),
    ("kronecker", 2, ((0, 1), (0, 1))),
    ("A3", 3, ((0, 1), (1, 2))),
    ("A3-sink", 3, ((0, 1), (2, 1))),
    ("A3-source", 3, ((1, 0), (1, 2))),
    ("D4", 4, ((0, 3), (1, 3), (2, 3))),
)


def random_matrix(f: FieldSpec, rows: int, cols: int, rng: random.Random, lo: int = -1, hi: int = 1) -> Matrix:
    return Matrix(f, [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)], cols)


def random_unimodular(f: FieldSpec, n: int, rng: random.Random, steps: Optional[int] = None) -> Matrix:
    """Product of elementary integer matrices (determinant +-1)."""
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 2 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-1, 1))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    if n and rng.random() < 0.5:
        k = rng.randrange(n)
        rows[k] = [-a for a in rows[k]]
    return Matrix(f, rows, n)


def quiver_representation(alg: AlgebraPresentation, n_vertices: int, arrows, dims: Sequence[int], maps) -> ModulePoint:
    """Module point of a path algebra from vertex dimensions and arrow matrices."""
    f = alg.field
    d = sum(dims)
    offs = [sum(dims[:i]) for i in range(n_vertices)]
    mats = []
    for i in range(n_vertices):
        rows = [[0] * d for _ in range(d)]
        for k in range(offs[i], offs[i] + dims[i]):
            rows[k][k] = 1
        mats.append(Matrix(f, rows, d))
    for (s, t), a in zip(arrows, maps):
        rows = [[0] * d for _ in range(d)]
        for r in range(dims[t]):
            for c in range(dims[s]):
                rows[offs[t] + r][offs[s] + c] = a[r, c]
        mats.append(Matrix(f, rows, d))
    return ModulePoint(alg, tuple(mats), d)


def random_quiver_module(rng: random.Random, f: FieldSpec = QQ, max_total: int = 5):
    name, n, arrows = rng.choice(QUIVERS)
    alg = AlgebraPresentation.path_algebra(f, n, arrows)
    while True:
        dims = [rng.randint(0, 2) for _ in range(n)]
        if 1 <= sum(dims) <= max_total:
            break
    maps = [random_matrix(f, dims[t], dims[s], rng, 0, 1) if rng.random() < 0.7 else random_matrix(f, dims[t], dims[s], rng)
            for s, t in arrows]
    return name, quiver_representation(alg, n, arrows, dims, maps)


def truncated_polynomial_algebra(f: FieldSpec, n: int) -> AlgebraPresentation:
    """k[x]/(x^n)."""
    return AlgebraPresentation(f, 1, (((1, (0,) * n),),), ("x",))


def random_nilpotent_module(rng: random.Random, f: FieldSpec = QQ, max_d: int = 5):
    """Random module over k[x]/(x^n): a conjugated nilpotent Jordan form."""
    d = rng.randint(1, max_d)
    parts, rest = [], d
    while rest:
        p = rng.randint(1, rest)
        parts.append(p)
        rest -= p
    parts.sort(reverse=True)
    alg = truncated_polynomial_algebra(f, max(parts) + rng.randint(0, 1))
    rows = [[0] * d for _ in range(d)]
    start = 0
    for p in parts:
        for i in range(start, start + p - 1):
            rows[i][i + 1] = 1
        start += p
    m = ModulePoint(alg, (Matrix(f, rows, d),), d)
    return "nilpotent", m.conjugate(random_unimodular(f, d, rng))


def random_small_module(rng: random.Random, f: FieldSpec = QQ):
    return random_quiver_module(rng, f) if rng.random() < 0.8 else random_nilpotent_module(rng, f)


def random_vector(f: FieldSpec, d: int, rng: random.Random) -> Matrix:
    return Matrix(f, [[rng.randint(-1, 1)] for _ in range(d)], 1)


def radical_basis(m: ModulePoint) -> Matrix:
    """Span of the images of the nilpotent generators (the radical for path and truncated algebras)."""
    imgs = [a.column_space_basis() for a in m.mats if a.is_nilpotent() and not a.is_zero()]
    if not imgs:
        return Matrix.zeros(m.field, m.d, 0)
    return generated_submodule(m, [Matrix.hstack(*imgs).col(j) for j in range(Matrix.hstack(*imgs).ncols)])


def random_submodule_basis(m: ModulePoint, rng: random.Random) -> Matrix:
    if rng.random() < 0.3:
        return radical_basis(m)
    k = rng.randint(1, 2)
    return generated_submodule(m, [random_vector(m.field, m.d, rng) for _ in range(k)])


@dataclass
class GeneratedCertificate:
    source: str
    certificate: DegenerationCertificate


def codim_one_certificates(rng: random.Random, attempts: int) -> Iterator[GeneratedCertificate]:
    """Filtration certificates ``M -> U + M/U`` whose orbit codimension is one."""
    for _ in range(attempts):
        name, m = random_small_module(rng)
        basis = random_submodule_basis(m, rng)
        if basis.ncols in (0, m.d):
            continue
        c = certificate_from_submodule(m, basis)
        if orbit_dim(m) - orbit_dim(c.N) != 1:
            continue
        yield GeneratedCertificate(name, c)


def random_exact_sequence(rng: random.Random, f: FieldSpec = QQ) -> Optional[ShortExactCandidate]:
    """``0 -> U -> W -> W/U -> 0`` from a random submodule, with random base changes.

    A quarter of the time W is replaced by ``U + V`` with the split maps
    (also disguised by a base change) so both verdicts occur.
    """
    _, W = random_small_module(rng, f)
    basis = radical_basis(W) if rng.random() < 0.5 else random_submodule_basis(W, rng)
    if basis.ncols == 0:
        return None
    U = submodule(W, basis)
    V, _, proj = quotient(W, basis)
    f_map, g_map = basis, proj
    if rng.random() < 0.25:
        W = direct_sum(U, V)
        f_map = Matrix.vstack(Matrix.identity(f, U.d), Matrix.zeros(f, V.d, U.d))
        g_map = Matrix.hstack(Matrix.zeros(f, V.d, U.d), Matrix.identity(f, V.d))
    P = random_unimodular(f, W.d, rng)
    Pi = P.inverse()
    W2 = W.conjugate(P)
    return ShortExactCandidate(U, W2, V, P @ f_map, g_map @ Pi)


# -- cusp (bi)modules -----------------------------------------------------------

def _in_semigroup(e: int) -> bool:
    return e == 0 or e >= 2


def _down_closed(exps: Sequence[int]) -> list:
    """Smallest set containing ``exps`` and closed under e -> e-2, e-3 within the semigroup."""
    out = set()
    stack = [e for e in exps if _in_semigroup(e)]
    while stack:
        e = stack.pop()
        if e in out:
            continue
        out.add(e)
        for s in (2, 3):
            if _in_semigroup(e - s) and e - s >= 0:
                stack.append(e - s)
    return sorted(out)


def monomial_module(f: FieldSpec, exps: Sequence[int]) -> CuspModule:
    """R modulo the monomial ideal spanned by exponents outside the down-closed set ``exps``."""
    D = _down_closed(exps)
    idx = {e: i for i, e in enumerate(D)}
    n = len(D)

    def shift(s):
        rows = [[0] * n for _ in range(n)]
        for e, i in idx.items():
            if e + s in idx:
                rows[idx[e + s]][i] = 1
        return Matrix(f, rows, n)

    return CuspModule(shift(2), shift(3))


def principal_quotient(f: FieldSpec, a: int) -> CuspModule:
    """R / m^a R for a in the semigroup, a > 0."""
    if a <= 0 or not _in_semigroup(a):
        raise ValueError("a must be a positive element of the semigroup")
    exps = [e for e in range(a + 4) if _in_semigroup(e) and not _in_semigroup(e - a)]
    return monomial_module(f, exps)


def polynomial_module(f: FieldSpec, n: int) -> CuspModule:
    """k[T]/(T^n) with m^2 acting by T^2 and m^3 by T^3."""
    def power(k):
        return Matrix(f, [[int(i == j + k) for j in range(n)] for i in range(n)], n)

    return CuspModule(power(2), power(3))


def random_cusp_module(rng: random.Random, f: FieldSpec = QQ) -> CuspModule:
    r = rng.random()
    if r < 0.4:
        return principal_quotient(f, rng.choice((2, 3, 4, 5, 6)))
    if r < 0.75:
        top = rng.choice((0, 2, 3, 4, 5, 6, 7))
        extra = [rng.choice((0, 2, 3, 4, 5)) for _ in range(rng.randint(0, 1))]
        return monomial_module(f, [top] + extra)
    return polynomial_module(f, rng.randint(1, 5))


def kron(a: Matrix, b: Matrix) -> Matrix:
    f = a.field
    rows = []
    for i in range(a.nrows):
        for k in range(b.nrows):
            rows.append([a[i, j] * b[k, l] for j in range(a.ncols) for l in range(b.ncols)])
    return Matrix(f, rows, a.ncols * b.ncols)


def tensor_bimodule(left: CuspModule, right: CuspModule) -> CuspBimodule:
    """``left (x) right`` with the right factor acting on the second tensor slot."""
    f = left.field
    Il, Ir = Matrix.identity(f, left.dim), Matrix.identity(f, right.dim)
    return CuspBimodule(kron(left.A, Ir), kron(left.B, Ir), kron(Il, right.A), kron(Il, right.B))


def symmetric_bimodule(m: CuspModule) -> CuspBimodule:
    return CuspBimodule(m.A, m.B, m.A, m.B)


def monomial_bimodule(f: FieldSpec, corners: Sequence[tuple]) -> CuspBimodule:
    """Quotient of R (x) R by a monomial ideal; ``corners`` generate the kept set."""
    keep = set()
    for a, b in corners:
        for x in _down_closed([a]):
            for y in _down_closed([b]):
                keep.add((x, y))
    D = sorted(keep)
    idx = {e: i for i, e in enumerate(D)}
    n = len(D)

    def shift(dx, dy):
        rows = [[0] * n for _ in range(n)]
        for (x, y), i in idx.items():
            tgt = (x + dx, y + dy)
            if tgt in idx:
                rows[idx[tgt]][i] = 1
        return Matrix(f, rows, n)

    return CuspBimodule(shift(2, 0), shift(3, 0), shift(0, 2), shift(0, 3))


def bimodule_sum(*bs: CuspBimodule) -> CuspBimodule:
    return CuspBimodule(*(Matrix.block_diag(*(b.actions[k] for b in bs)) for k in range(4)))


def _base_bimodule(rng: random.Random, f: FieldSpec, max_dim: int) -> CuspBimodule:
    while True:
        r = rng.random()
        if r < 0.5:
            b = tensor_bimodule(random_cusp_module(rng, f), random_cusp_module(rng, f))
        elif r < 0.75:
            corners = [(rng.choice((0, 2, 3, 4, 5)), rng.choice((0, 2, 3, 4))) for _ in range(rng.randint(1, 2))]
            b = monomial_bimodule(f, corners)
        else:
            b = symmetric_bimodule(random_cusp_module(rng, f))
        if 1 <= b.dim <= max_dim:
            return b


def random_cusp_bimodule(rng: random.Random, f: FieldSpec = QQ, max_dim: int = 9) -> CuspBimodule:
    """Random valid bimodule of dimension at most ``max_dim``, possibly a direct sum,
    usually disguised by an integral base change."""
    if max_dim >= 2 and rng.random() < 0.25:
        first = _base_bimodule(rng, f, max_dim - 1)
        b = bimodule_sum(first, _base_bimodule(rng, f, max_dim - first.dim))
    else:
        b = _base_bimodule(rng, f, max_dim)
    if rng.random() < 0.6:
        b = b.conjugate(random_unimodular(f, b.dim, rng))
    return b


def invariant_subspaces(b: CuspBimodule, rng: random.Random) -> list:
    """Column bases of a few sub-bimodules of ``b`` (images, kernels, cyclic spans)."""
    f, n = b.field, b.dim
    out = []
    for a in b.actions:
        img = a.column_space_basis()
        if img.ncols:
            out.append(img)
        ker = a.nullspace()
        if ker:
            out.append(Matrix.hstack(*ker))
    v = Matrix(f, [[rng.randint(-1, 1)] for _ in range(n)], 1)
    if not v.is_zero():
        span = v
        while True:
            bigger = Matrix.hstack(span, *(a @ span for a in b.actions)).column_space_basis()
            if bigger.ncols == span.ncols:
                break
            span = bigger
        out.append(span)
    return out


def random_triple(rng: random.Random, f: FieldSpec = QQ):
    """``(sub, total, embed)`` with ``embed`` an intertwining inclusion."""
    while True:
        if rng.random() < 0.4:
            # tensor products of principal quotients have [P2]
            a, c = rng.choice((2, 3, 4)), rng.choice((2, 3))
            total = tensor_bimodule(principal_quotient(f, a), principal_quotient(f, c))
            total = total.conjugate(random_unimodular(f, total.dim, rng))
        else:
            total = random_cusp_bimodule(rng, f)
        if rng.random() < 0.25:
            # summand inclusion
            other = random_cusp_bimodule(rng, f, 5)
            big = bimodule_sum(other, total)
            embed = Matrix.vstack(Matrix.identity(f, other.dim), Matrix.zeros(f, total.dim, other.dim))
            return other, big, embed
        subs = invariant_subspaces(total, rng)
        if not subs:
            continue
        basis = rng.choice(subs)
        sub = restrict_bimodule(total, basis)
        if sub is not None:
            return sub, total, basis
