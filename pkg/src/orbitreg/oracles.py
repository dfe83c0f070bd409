"""Independent oracles: Jordan-type Hom counts and a bounded search for self-extensions."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .algmod import (
    AlgebraPresentation,
    ModulePoint,
    find_isomorphism,
    hom_space,
    split_local_by_enumeration,
)
from .degen import SelfExtensionDatum, check_exact, check_split
from .exactfield import FieldSpec, Matrix


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if any(x <= 0 for x in parts):
            raise ValueError("parts must be positive")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError("parts must be weakly decreasing")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def partitions(n: int) -> list:
    """All partitions of ``n``, largest first part first."""

    def gen(rest, cap):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return [Partition(p) for p in gen(n, n)]


def partition_hom(lam: Partition, mu: Partition) -> int:
    """dim Hom between nilpotent Jordan modules: sum of min(lambda_i, mu_j)."""
    return sum(min(a, b) for a in lam.parts for b in mu.parts)


def jordan_matrix(f: FieldSpec, lam: Partition) -> Matrix:
    d = lam.size
    rows = [[0] * d for _ in range(d)]
    start = 0
    for size in lam.parts:
        for i in range(start, start + size - 1):
            rows[i][i + 1] = 1
        start += size
    return Matrix(f, rows, d)


def jordan_module(lam: Partition, f: FieldSpec) -> ModulePoint:
    """Module over k[x] (no relations) with x acting by the nilpotent Jordan form of type ``lam``."""
    return ModulePoint.of(AlgebraPresentation.free(f, 1), [jordan_matrix(f, lam)], lam.size)


# -- self-extension search ---------------------------------------------------


@dataclass
class SearchResult:
    data: list
    candidates: int
    exhausted: bool
    skipped_z: int = 0
    notes: list = field(default_factory=list)


def _lower_tuples(f: FieldSpec, d: int, t: int, rng: random.Random, cap: int) -> list:
    """t-tuples of strictly lower triangular matrices: all of them, or ``cap`` samples."""
    slots = [(i, j) for i in range(d) for j in range(i)]
    n = len(slots)

    def build(flat):
        mats = []
        for k in range(t):
            rows = [[0] * d for _ in range(d)]
            for (i, j), v in zip(slots, flat[k * n:(k + 1) * n]):
                rows[i][j] = v
            mats.append(Matrix(f, rows, d))
        return tuple(mats)

    if f.p ** (t * n) <= cap:
        return [build(flat) for flat in itertools.product(range(f.p), repeat=t * n)]
    seen = {}
    for _ in range(cap):
        flat = tuple(rng.randrange(f.p) for _ in range(t * n))
        seen.setdefault(flat, build(flat))
    return [seen[k] for k in sorted(seen)]


def _signature(m: ModulePoint) -> tuple:
    words = [(i,) for i in range(m.algebra.t)] + list(itertools.product(range(m.algebra.t), repeat=2))
    return (hom_space(m, m).dim,) + tuple(m.evaluate(w).rank() for w in words)


def iso_classes(mods: Sequence[ModulePoint]) -> list:
    """One representative per isomorphism class found (first occurrence kept)."""
    buckets = {}
    out = []
    for m in mods:
        bucket = buckets.setdefault(_signature(m), [])
        if any(find_isomorphism(m, other) is not None for other in bucket):
            continue
        bucket.append(m)
        out.append(m)
    return out


def _span_elements(f: FieldSpec, basis: Sequence[Matrix], rng: random.Random, cap: int) -> list:
    """All combinations of ``basis`` if there are at most ``cap``, else ``cap`` random ones."""
    if not basis:
        return [None]
    zero = Matrix.zeros(f, *basis[0].shape)

    def comb(coeffs):
        acc = zero
        for c, b in zip(coeffs, basis):
            if c:
                acc = acc + b.scale(c)
        return acc

    if f.p ** len(basis) <= cap:
        return [comb(c) for c in itertools.product(range(f.p), repeat=len(basis))]
    return [comb([rng.randrange(f.p) for _ in basis]) for _ in range(cap)]


def _encode(s: SelfExtensionDatum) -> tuple:
    mats = list(s.Z.mats) + list(s.Y.mats) + [s.ftilde, s.gtilde, s.htilde]
    return tuple(int(x) for m in mats for x in m.entries)


def search_thm2(
    f: FieldSpec,
    dZ: int,
    t: int,
    budget: int,
    seed: int = 0,
    pool_cap: int = 4096,
    g_cap: int = 64,
    h_cap: int = 32,
    z_modules: Optional[Sequence[ModulePoint]] = None,
    y_modules: Optional[Sequence[ModulePoint]] = None,
) -> SearchResult:
    """Nonsplit sequences ``0 -> Z -> Z+Y -> Z -> 0`` over F_p with Z split local.

    Z and Y are t-tuples of strictly lower triangular dZ x dZ matrices over the
    free algebra on t generators, taken up to isomorphism (all tuples when there
    are at most ``pool_cap``, a seeded sample otherwise).  Z is kept only when
    End(Z) can be enumerated and every endomorphism is scalar plus nilpotent.
    f~ runs over the nonzero nilpotent endomorphisms of Z, g~ over Hom(Z, Y)
    and h~ over the solutions of ``h~ g~ = f~^2``.  ``budget`` bounds the number
    of candidate sequences checked; explicit pools may replace the generated ones.
    """
    if not f.is_prime:
        raise ValueError("search runs over a prime field")
    if dZ < 1 or t < 1:
        raise ValueError("dZ and t must be positive")
    rng = random.Random(seed)
    alg = AlgebraPresentation.free(f, t)
    if z_modules is None or y_modules is None:
        generated = iso_classes([ModulePoint.of(alg, m, dZ) for m in _lower_tuples(f, dZ, t, rng, pool_cap)])
    zs = list(z_modules) if z_modules is not None else generated
    ys = list(y_modules) if y_modules is not None else generated
    found = {}
    used = 0
    skipped = 0
    exhausted = False
    for Z in zs:
        if exhausted:
            break
        local = split_local_by_enumeration(Z)
        if local is not True:
            skipped += local is None
            continue
        ends = _span_elements(f, hom_space(Z, Z).basis, rng, 4096)
        # f~ = 0 forces g~ and h~ to be isomorphisms, hence a split sequence
        nilp = [e for e in ends if e is not None and not e.is_zero() and e.is_nilpotent()]
        if not nilp:
            continue
        for Y in ys:
            if exhausted:
                break
            if Y.d != Z.d or Y.algebra != Z.algebra:
                continue
            H_zy = hom_space(Z, Y).basis
            H_yz = hom_space(Y, Z).basis
            if not H_zy or not H_yz:
                continue
            gs = [g for g in _span_elements(f, H_zy, rng, g_cap) if not g.is_zero()]
            for ft, gt in itertools.product(nilp, gs):
                if exhausted:
                    break
                if Matrix.vstack(ft, gt).rank() != Z.d:
                    continue
                A = Matrix.from_columns(f, [(h @ gt).entries for h in H_yz], Z.d * Z.d)
                part = A.solve(Matrix(f, [[x] for x in (ft @ ft).entries]))
                if part is None:
                    continue
                base = _combine(H_yz, [r[0] for r in part.rows])
                shifts = _span_elements(f, [_combine(H_yz, [r[0] for r in k.rows]) for k in A.nullspace()], rng, h_cap)
                for sh in shifts:
                    if used >= budget:
                        exhausted = True
                        break
                    used += 1
                    ht = base if sh is None else base + sh
                    datum = SelfExtensionDatum(Z, Y, ft, gt, ht)
                    seq = datum.sequence()
                    if check_exact(seq).ok and not check_split(seq):
                        found.setdefault(_encode(datum), datum)
    data = [found[k] for k in sorted(found)]
    notes = ["budget exhausted; list is partial"] if exhausted else []
    return SearchResult(data, used, exhausted, skipped, notes)


def _combine(basis: Sequence[Matrix], coeffs) -> Matrix:
    acc = Matrix.zeros(basis[0].field, *basis[0].shape)
    for c, b in zip(coeffs, basis):
        if c:
            acc = acc + b.scale(c)
    return acc
