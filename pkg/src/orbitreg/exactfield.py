"""Exact scalars and dense matrices over Q or F_p.

Everything above this module is built on :class:`Matrix`.  Rational entries are
:class:`fractions.Fraction` (or plain ``int``), prime-field entries are ``int``
in ``[0, p)``.  There are no tolerances anywhere: every rank, kernel and
solution is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

__all__ = ["FieldSpec", "Matrix", "QQ", "GF", "rref"]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Ground field of a computation: ``Rational`` or ``Prime`` with modulus ``p``."""

    kind: str = "Rational"
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "Rational":
            if self.p is not None:
                raise ValueError("rational field takes no modulus")
        elif self.kind == "Prime":
            if self.p is None or not (2 <= self.p < 2**31) or not _is_prime(self.p):
                raise ValueError(f"invalid prime modulus {self.p!r}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def is_prime(self) -> bool:
        return self.kind == "Prime"

    def __call__(self, x):
        """Coerce an int, Fraction or serialized string into a field element."""
        if isinstance(x, str):
            return self.parse(x)
        if self.p is not None:
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError(f"denominator {x.denominator} vanishes mod {self.p}")
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, int):
            return x
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def parse(self, s: str):
        s = s.strip()
        if "/" in s:
            n, d = s.split("/")
            q = Fraction(int(n), int(d))
        else:
            q = Fraction(int(s))
        return self(q)

    def format(self, x) -> str:
        if self.p is not None:
            return str(int(x) % self.p)
        q = Fraction(x)
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

    def inv(self, x):
        if self.p is not None:
            return pow(x, -1, self.p)
        return Fraction(1) / x

    def __str__(self) -> str:
        return "Q" if self.p is None else f"F_{self.p}"

    def to_json(self):
        return {"kind": self.kind} if self.p is None else {"kind": self.kind, "p": self.p}


QQ = FieldSpec("Rational")


def GF(p: int) -> FieldSpec:
    return FieldSpec("Prime", p)


# ---------------------------------------------------------------------------
# elimination kernels


def _primitive(row: list) -> list:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    if g > 1:
        return [x // g for x in row]
    return row


def _integer_rows(rows: Sequence[Sequence]) -> list:
    out = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // gcd(den, x.denominator)
        if den == 1:
            ir = [int(x) for x in r]
        else:
            ir = [x.numerator * (den // x.denominator) if isinstance(x, Fraction) else x * den for x in r]
        out.append(_primitive(ir))
    return out


def _rref_rational(rows, ncols, full=True):
    # fraction-free Gauss-Jordan on primitive integer rows; pivot = first nonzero
    M = _integer_rows(rows)
    nrows = len(M)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        k = r
        while k < nrows and M[k][c] == 0:
            k += 1
        if k == nrows:
            continue
        if k != r:
            M[r], M[k] = M[k], M[r]
        piv = M[r]
        b = piv[c]
        targets = range(nrows) if full else range(r + 1, nrows)
        for i in targets:
            if i == r:
                continue
            row = M[i]
            a = row[c]
            if a == 0:
                continue
            g = gcd(a, b)
            a1, b1 = a // g, b // g
            M[i] = _primitive([b1 * x - a1 * y for x, y in zip(row, piv)])
        pivots.append(c)
        r += 1
    if not full:
        return M[:r], pivots
    out = []
    for i, c in enumerate(pivots):
        d = M[i][c]
        out.append([Fraction(x, d) if x % d else x // d for x in M[i]])
    return out, pivots


def _rref_prime(rows, ncols, p, full=True):
    M = [[x % p for x in r] for r in rows]
    nrows = len(M)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        k = r
        while k < nrows and M[k][c] == 0:
            k += 1
        if k == nrows:
            continue
        if k != r:
            M[r], M[k] = M[k], M[r]
        inv = pow(M[r][c], -1, p)
        piv = [(x * inv) % p for x in M[r]]
        M[r] = piv
        targets = range(nrows) if full else range(r + 1, nrows)
        for i in targets:
            if i == r:
                continue
            a = M[i][c]
            if a:
                M[i] = [(x - a * y) % p for x, y in zip(M[i], piv)]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rref(field: FieldSpec, rows: Sequence[Sequence], ncols: int, full: bool = True):
    """Row-reduce ``rows``; returns (nonzero rows, pivot columns).

    With ``full=False`` only the forward pass is done (enough for rank).
    """
    if field.p is None:
        return _rref_rational(rows, ncols, full)
    return _rref_prime(rows, ncols, field.p, full)


# ---------------------------------------------------------------------------


class Matrix:
    """Immutable dense matrix over a :class:`FieldSpec`.

    Entries live in ``self.rows`` as a tuple of row tuples.  Products use ``@``.
    """

    __slots__ = ("field", "nrows", "ncols", "rows", "_hash")

    def __init__(self, field: FieldSpec, rows: Iterable[Iterable], ncols: Optional[int] = None, _raw=False):
        self.field = field
        if _raw:
            self.rows = rows
        else:
            self.rows = tuple(tuple(field(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        if self.nrows:
            self.ncols = len(self.rows[0])
            if any(len(r) != self.ncols for r in self.rows):
                raise ValueError("ragged matrix rows")
            if ncols is not None and ncols != self.ncols:
                raise ValueError("column count mismatch")
        else:
            self.ncols = 0 if ncols is None else ncols
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def _make(cls, field, rows, ncols):
        return cls(field, tuple(tuple(r) for r in rows), ncols, _raw=True)

    @classmethod
    def zeros(cls, field: FieldSpec, nrows: int, ncols: int) -> "Matrix":
        return cls._make(field, [[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls._make(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, field: FieldSpec, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        return cls(field, [[c[i] for c in cols] for i in range(nrows)], len(cols))

    @classmethod
    def column(cls, field: FieldSpec, values: Sequence) -> "Matrix":
        return cls(field, [[v] for v in values], 1)

    @classmethod
    def unit(cls, field: FieldSpec, nrows: int, ncols: int, i: int, j: int) -> "Matrix":
        rows = [[0] * ncols for _ in range(nrows)]
        rows[i][j] = 1
        return cls._make(field, rows, ncols)

    # -- basic protocol ---------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def entries(self) -> tuple:
        """Row-major flattened entries."""
        return tuple(x for r in self.rows for x in r)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.field == other.field and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field, self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.field.format(x) for x in r) for r in self.rows)
        return f"Matrix<{self.nrows}x{self.ncols} over {self.field}>[{body}]"

    def tolist(self) -> list:
        """Serialized entries (list of row lists of strings)."""
        return [[self.field.format(x) for x in r] for r in self.rows]

    # -- arithmetic -------------------------------------------------------

    def _check_same(self, other):
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def _reduce(self, rows):
        p = self.field.p
        if p is None:
            return rows
        return [[x % p for x in r] for r in rows]

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        rows = [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return Matrix._make(self.field, self._reduce(rows), self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        rows = [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return Matrix._make(self.field, self._reduce(rows), self.ncols)

    def __neg__(self) -> "Matrix":
        return Matrix._make(self.field, self._reduce([[-a for a in r] for r in self.rows]), self.ncols)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix._make(self.field, self._reduce([[c * a for a in r] for r in self.rows]), self.ncols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            if not nz:
                out.append([0] * other.ncols)
                continue
            out.append([sum(a * col[k] for k, a in nz) for col in cols])
        return Matrix._make(self.field, self._reduce(out), other.ncols)

    def __pow__(self, k: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValueError("power of a non-square matrix")
        result = Matrix.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    @property
    def T(self) -> "Matrix":
        return Matrix._make(self.field, list(zip(*self.rows)) if self.nrows else [], self.nrows)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_nilpotent(self) -> bool:
        if not self.is_square():
            raise ValueError("nilpotency of a non-square matrix")
        return (self ** self.nrows).is_zero()

    def trace(self):
        return self.field(sum(self.rows[i][i] for i in range(self.nrows)))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._make(self.field, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def col(self, j: int) -> "Matrix":
        return Matrix._make(self.field, [[r[j]] for r in self.rows], 1)

    def vec(self) -> list:
        return list(self.entries)

    @staticmethod
    def hstack(*mats: "Matrix") -> "Matrix":
        f = mats[0].field
        n = mats[0].nrows
        if any(m.nrows != n for m in mats):
            raise ValueError("hstack row mismatch")
        rows = [sum((m.rows[i] for m in mats), ()) for i in range(n)]
        return Matrix._make(f, rows, sum(m.ncols for m in mats))

    @staticmethod
    def vstack(*mats: "Matrix") -> "Matrix":
        f = mats[0].field
        c = mats[0].ncols
        if any(m.ncols != c for m in mats):
            raise ValueError("vstack column mismatch")
        return Matrix._make(f, [r for m in mats for r in m.rows], c)

    @staticmethod
    def block_diag(*mats: "Matrix") -> "Matrix":
        f = mats[0].field
        total = sum(m.ncols for m in mats)
        rows = []
        off = 0
        for m in mats:
            for r in m.rows:
                rows.append([0] * off + list(r) + [0] * (total - off - m.ncols))
            off += m.ncols
        return Matrix._make(f, rows, total)

    @staticmethod
    def block(blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        return Matrix.vstack(*[Matrix.hstack(*row) for row in blocks])

    # -- linear algebra ---------------------------------------------------

    def rank(self) -> int:
        if self.nrows == 0 or self.ncols == 0:
            return 0
        _, piv = rref(self.field, self.rows, self.ncols, full=False)
        return len(piv)

    def rref(self):
        """Reduced row echelon form and pivot columns."""
        R, piv = rref(self.field, self.rows, self.ncols)
        return Matrix(self.field, R, self.ncols) if R else Matrix.zeros(self.field, 0, self.ncols), piv

    def nullspace(self) -> list:
        """Canonical kernel basis (one column per free variable of the RREF)."""
        n = self.ncols
        if self.nrows == 0:
            R, piv = [], []
        else:
            R, piv = rref(self.field, self.rows, n)
        pivset = set(piv)
        basis = []
        for j in range(n):
            if j in pivset:
                continue
            v = [0] * n
            v[j] = 1
            for i, c in enumerate(piv):
                v[c] = -R[i][j]
            basis.append(Matrix._make(self.field, self._reduce([[x] for x in v]), 1))
        return basis

    def column_space_basis(self) -> "Matrix":
        """Pivot columns of ``self`` (an independent spanning set of the image)."""
        if self.nrows == 0 or self.ncols == 0:
            return Matrix.zeros(self.field, self.nrows, 0)
        _, piv = rref(self.field, self.rows, self.ncols, full=False)
        return self.submatrix(range(self.nrows), piv)

    def solve(self, B: "Matrix") -> Optional["Matrix"]:
        """Some X with self @ X == B, free variables set to zero; None if inconsistent."""
        if self.nrows != B.nrows:
            raise ValueError(f"solve: row mismatch {self.shape} vs {B.shape}")
        if self.field != B.field:
            raise ValueError("solve: field mismatch")
        n, k = self.ncols, B.ncols
        if self.nrows == 0:
            return Matrix.zeros(self.field, n, k)
        aug = [a + b for a, b in zip(self.rows, B.rows)]
        R, piv = rref(self.field, aug, n + k)
        if piv and piv[-1] >= n:
            return None
        X = [[0] * k for _ in range(n)]
        for i, c in enumerate(piv):
            X[c] = list(R[i][n:])
        return Matrix._make(self.field, X, k)

    def inverse(self) -> Optional["Matrix"]:
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        if n == 0:
            return self
        X = self.solve(Matrix.identity(self.field, n))
        if X is None or self.rank() < n:
            return None
        return X

    def det(self):
        """Determinant by elimination (used by isomorphism tests)."""
        if not self.is_square():
            raise ValueError("det of a non-square matrix")
        f = self.field
        n = self.nrows
        M = [[Fraction(x) if f.p is None else x for x in r] for r in self.rows]
        d = f(1)
        for c in range(n):
            k = next((i for i in range(c, n) if M[i][c] != 0), None)
            if k is None:
                return f(0)
            if k != c:
                M[c], M[k] = M[k], M[c]
                d = -d
            piv = M[c][c]
            d = d * piv
            inv = f.inv(piv)
            for i in range(c + 1, n):
                a = M[i][c]
                if a:
                    fac = a * inv
                    M[i] = [x - fac * y for x, y in zip(M[i], M[c])]
                    if f.p is not None:
                        M[i] = [x % f.p for x in M[i]]
        return f(d)

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.nrows


def zero_like(field: FieldSpec, shape) -> Matrix:
    return Matrix.zeros(field, *shape)
