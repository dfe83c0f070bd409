"""Finite-dimensional modules and bimodules over the cusp ring R = k[m^2, m^3].

A left module is a pair of commuting operators ``A`` (multiplication by m^2)
and ``B`` (by m^3) with ``A^3 = B^2``; m^4 is always ``A^2``.  Right modules
store matrices acting on row vectors from the right, ``x -> x A``.  In a
bimodule all four operators (left and right actions) act on column vectors and
commute pairwise.

For a bimodule ``M`` let ``N`` be the space of 2x2 matrices over ``M``; ``xi``
is left multiplication by ``[[m^3, -m^2], [m^4, -m^3]]`` and ``eta`` right
multiplication by ``[[m^3, m^4], [-m^2, -m^3]]``.  The exactness properties
[P1], [P1'] and [P2] are decided by ranks of these block operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .algmod import Coordinates, ModulePoint, complete_basis, hom_space, is_hom
from .exactfield import FieldSpec, Matrix
from .report import FAIL, PASS, PRECONDITION, Report

LEFT = "Left"
RIGHT = "Right"


class InvalidCuspModule(ValueError):
    pass


def _relations_hold(A: Matrix, B: Matrix) -> bool:
    return A @ B == B @ A and A @ A @ A == B @ B


@dataclass(frozen=True)
class CuspModule:
    A: Matrix
    B: Matrix
    side: str = LEFT

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")
        if self.A.shape != self.B.shape or not self.A.is_square():
            raise InvalidCuspModule("actions must be square of equal size")

    @property
    def dim(self) -> int:
        return self.A.nrows

    @property
    def field(self) -> FieldSpec:
        return self.A.field

    def is_valid(self) -> bool:
        return _relations_hold(self.A, self.B)

    def transpose(self) -> "CuspModule":
        """Same space viewed from the other side (row vectors <-> column vectors)."""
        return CuspModule(self.A.T, self.B.T, RIGHT if self.side == LEFT else LEFT)


@dataclass(frozen=True)
class CuspBimodule:
    LA: Matrix
    LB: Matrix
    RA: Matrix
    RB: Matrix

    @property
    def dim(self) -> int:
        return self.LA.nrows

    @property
    def field(self) -> FieldSpec:
        return self.LA.field

    @property
    def actions(self):
        return (self.LA, self.LB, self.RA, self.RB)

    def invariant_failures(self) -> list:
        out = []
        if not _relations_hold(self.LA, self.LB):
            out.append("left actions violate AB = BA or A^3 = B^2")
        if not _relations_hold(self.RA, self.RB):
            out.append("right actions violate AB = BA or A^3 = B^2")
        for L, ln in ((self.LA, "LA"), (self.LB, "LB")):
            for R, rn in ((self.RA, "RA"), (self.RB, "RB")):
                if L @ R != R @ L:
                    out.append(f"{ln} does not commute with {rn}")
        return out

    def is_valid(self) -> bool:
        return not self.invariant_failures()

    def left_module(self) -> CuspModule:
        return CuspModule(self.LA, self.LB, LEFT)

    def right_module(self) -> CuspModule:
        # right actions are stored on columns; as a right module on rows they transpose
        return CuspModule(self.RA.T, self.RB.T, RIGHT)

    def conjugate(self, g: Matrix) -> "CuspBimodule":
        gi = g.inverse()
        return CuspBimodule(*(g @ a @ gi for a in self.actions))


def xi_operator(A: Matrix, B: Matrix) -> Matrix:
    """``[[B, -A], [A^2, -B]]`` acting on pairs of column vectors."""
    return Matrix.block([[B, -A], [A @ A, -B]])


def _require_valid(m: CuspModule):
    if not m.is_valid():
        raise InvalidCuspModule("actions violate AB = BA or A^3 = B^2")


def check_p1(m: CuspModule) -> bool:
    """[P1]: ``M^2 -Xi-> M^2 -Xi-> M^2`` exact, i.e. rank Xi = dim M."""
    if m.side != LEFT:
        raise ValueError("[P1] is a property of left modules")
    _require_valid(m)
    return xi_operator(m.A, m.B).rank() == m.dim


def right_xi_operator(A: Matrix, B: Matrix) -> Matrix:
    """Matrix of ``(x1, x2) -> (x1, x2) [[m^3, m^4], [-m^2, -m^3]]`` on row pairs."""
    return Matrix.block([[B, A @ A], [-A, -B]])


def check_p1prime(m: CuspModule) -> bool:
    """[P1'] for a right module (row-vector convention)."""
    if m.side != RIGHT:
        raise ValueError("[P1'] is a property of right modules")
    _require_valid(m)
    return right_xi_operator(m.A, m.B).rank() == m.dim


def _block4(f: FieldSpec, n: int, entries: dict) -> Matrix:
    # entries: (row block, col block) -> n x n matrix, blocks indexed 0..3
    Z = Matrix.zeros(f, n, n)
    return Matrix.block([[entries.get((r, c), Z) for c in range(4)] for r in range(4)])


def xi_eta(b: CuspBimodule):
    """``(xi, eta)`` on ``N = M^{2x2}``, blocks ordered ``n11, n12, n21, n22``."""
    f, n = b.field, b.dim
    LA2, RA2 = b.LA @ b.LA, b.RA @ b.RA
    xi = {}
    for j in range(2):
        top, bot = j, 2 + j
        xi[(top, top)] = b.LB
        xi[(top, bot)] = -b.LA
        xi[(bot, top)] = LA2
        xi[(bot, bot)] = -b.LB
    eta = {}
    for i in range(2):
        c1, c2 = 2 * i, 2 * i + 1
        eta[(c1, c1)] = b.RB
        eta[(c1, c2)] = -b.RA
        eta[(c2, c1)] = RA2
        eta[(c2, c2)] = -b.RB
    return _block4(f, n, xi), _block4(f, n, eta)


def _require_bimodule(b: CuspBimodule):
    bad = b.invariant_failures()
    if bad:
        raise InvalidCuspModule("; ".join(bad))


def check_p2(b: CuspBimodule) -> bool:
    """[P2]: ``N -xi eta-> N -(xi; eta)-> N + N`` exact."""
    _require_bimodule(b)
    if b.dim == 0:
        return True
    xi, eta = xi_eta(b)
    xe = xi @ eta
    if not ((xi @ xe).is_zero() and (eta @ xe).is_zero()):
        raise ArithmeticError("im(xi eta) not inside ker xi and ker eta")
    N = 4 * b.dim
    return xe.rank() == N - Matrix.vstack(xi, eta).rank()


def check_long_n(b: CuspBimodule) -> Report:
    """Exactness of ``N^2 -> N -> N -> N^2 -> N^3`` plus [P1] and [P1'] for a [P2] bimodule."""
    _require_bimodule(b)
    if not check_p2(b):
        return Report(PRECONDITION, {}, ["bimodule does not have property [P2]"])
    if b.dim == 0:
        return Report(PASS, {"dim": 0}, ["zero bimodule"])
    f = b.field
    xi, eta = xi_eta(b)
    N = 4 * b.dim
    Z = Matrix.zeros(f, N, N)
    a1 = Matrix.hstack(xi, eta)
    a2 = xi @ eta
    a3 = Matrix.vstack(xi, eta)
    a4 = Matrix.block([[xi, Z], [eta, -xi], [Z, eta]])
    ranks = [a.rank() for a in (a1, a2, a3, a4)]
    values = {"dim": b.dim, "ranks": ranks}
    bad = []
    for k, (p, q) in enumerate(((a2, a1), (a3, a2), (a4, a3))):
        if not (p @ q).is_zero():
            bad.append(f"composite {k + 2}.{k + 1} nonzero")
    # kernel of the outgoing map equals image of the incoming one
    if ranks[0] + ranks[1] != N:
        bad.append("not exact at first N")
    if ranks[1] + ranks[2] != N:
        bad.append("not exact at second N")
    if ranks[2] + ranks[3] != 2 * N:
        bad.append("not exact at N + N")
    values["P1_left"] = check_p1(b.left_module())
    values["P1prime_right"] = check_p1prime(b.right_module())
    if not values["P1_left"]:
        bad.append("left module lacks [P1]")
    if not values["P1prime_right"]:
        bad.append("right module lacks [P1']")
    return Report(FAIL if bad else PASS, values, bad)


def restrict_bimodule(total: CuspBimodule, basis: Matrix) -> Optional[CuspBimodule]:
    """Sub-bimodule spanned by the (independent) columns of ``basis``; None if not invariant."""
    out = []
    for a in total.actions:
        x = basis.solve(a @ basis)
        if x is None:
            return None
        out.append(x)
    return CuspBimodule(*out)


def quotient_bimodule(total: CuspBimodule, embed: Matrix) -> CuspBimodule:
    r, n = embed.ncols, total.dim
    f = total.field
    if r == n:
        z = Matrix.zeros(f, 0, 0)
        return CuspBimodule(z, z, z, z)
    P = complete_basis(embed) if r else Matrix.identity(f, n)
    Pi = P.inverse()
    acts = [(Pi @ a @ P).submatrix(range(r, n), range(r, n)) for a in total.actions]
    return CuspBimodule(*acts)


def two_of_three(sub: CuspBimodule, total: CuspBimodule, embed: Matrix) -> Report:
    """2-out-of-3 for [P2] along ``0 -> sub -> total -> total/sub -> 0``."""
    if embed.shape != (total.dim, sub.dim) or embed.rank() != sub.dim:
        raise ValueError("embedding must be injective with matching shape")
    for s, t in zip(sub.actions, total.actions):
        if embed @ s != t @ embed:
            raise ValueError("embedding does not intertwine the actions")
    quot = quotient_bimodule(total, embed)
    verdicts = {"sub": check_p2(sub), "total": check_p2(total), "quotient": check_p2(quot)}
    n_true = sum(verdicts.values())
    values = dict(verdicts, dims=[sub.dim, total.dim, quot.dim])
    if n_true == 2:
        missing = [k for k, v in verdicts.items() if not v]
        return Report(FAIL, values, [f"two have [P2] but {missing[0]} does not"])
    return Report(PASS, values, [])


def endo_bimodule(Y: ModulePoint, x: Matrix, y: Matrix) -> CuspBimodule:
    """End_A(Y) as an R-R-bimodule, m^2 acting by x and m^3 by y.

    Left actions postcompose, right actions precompose; all four are written
    in the canonical Hom basis of End_A(Y).
    """
    if not (is_hom(x, Y, Y) and is_hom(y, Y, Y)):
        raise ValueError("x and y must be endomorphisms of Y")
    if x @ y != y @ x or x @ x @ x != y @ y:
        raise ValueError("x, y violate xy = yx or x^3 = y^2")
    basis = hom_space(Y, Y).basis
    f = Y.field
    n = len(basis)
    if n == 0:
        z = Matrix.zeros(f, 0, 0)
        return CuspBimodule(z, z, z, z)
    co = Coordinates(basis)

    def op(fn):
        cols = [co.coords(fn(b)) for b in basis]
        return Matrix.from_columns(f, cols, n)

    b = CuspBimodule(op(lambda e: x @ e), op(lambda e: y @ e), op(lambda e: e @ x), op(lambda e: e @ y))
    _require_bimodule(b)
    return b
