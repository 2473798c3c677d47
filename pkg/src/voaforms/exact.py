"""Exact rational matrices and integer lattice arithmetic.

Everything in this module is exact: scalars are ``fractions.Fraction``,
lattices are free abelian subgroups of Q^n held in a canonical form, and all
normal-form computations (Hermite, Smith) run over arbitrary-precision
integers.  The canonical lattice representation is a row-style Hermite normal
form over a cleared common denominator, so lattice equality is a plain
comparison of the stored data.

Values are immutable after construction; every operation is a pure function
of its inputs and may be evaluated concurrently without coordination.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence


class DimensionMismatchError(ValueError):
    """Operands live in different ambient spaces."""


class NotSublatticeError(ValueError):
    """A quotient was requested for B not contained in A."""


class SpanMismatchError(ValueError):
    """A finite quotient was requested but the rational spans differ."""


class DegenerateFormError(ValueError):
    """A bilinear form is singular on the relevant span."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (decimal strings) into a Fraction."""
    return Fraction(text.strip())


def format_rational(value: Fraction) -> str:
    """Format a Fraction as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    f = Fraction(value)
    return str(f)


# ---------------------------------------------------------------------------
# rational matrices
# ---------------------------------------------------------------------------

class QMatrix:
    """Immutable dense matrix over the rationals, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable) -> None:
        ents = tuple(Fraction(e) for e in entries)
        if len(ents) != rows * cols:
            raise ValueError(
                f"entry count {len(ents)} != rows*cols = {rows * cols}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", ents)

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("QMatrix is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "QMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = [e for row in rows for e in row]
        return cls(r, c, flat)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, [Fraction(int(i == j)) for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "QMatrix":
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_list(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "QMatrix":
        return QMatrix(self.cols, self.rows,
                       [self.entry(i, j) for j in range(self.cols)
                        for i in range(self.rows)])

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        return QMatrix(self.rows, self.cols,
                       [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        return QMatrix(self.rows, self.cols,
                       [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, c) -> "QMatrix":
        c = Fraction(c)
        return QMatrix(self.rows, self.cols, [c * e for e in self.entries])

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError("inner dimensions differ")
        a, b = self.row_list(), other.row_list()
        out = []
        for i in range(self.rows):
            ai = a[i]
            for j in range(other.cols):
                out.append(sum((ai[k] * b[k][j] for k in range(self.cols)),
                               Fraction(0)))
        return QMatrix(self.rows, other.cols, out)

    def __mul__(self, other):
        if isinstance(other, QMatrix):
            return self.__matmul__(other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, QMatrix)
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(e) for e in self.row(i))
                         for i in range(self.rows))
        return f"QMatrix({self.rows}x{self.cols}: {body})"

    def is_symmetric(self) -> bool:
        return (self.rows == self.cols
                and all(self.entry(i, j) == self.entry(j, i)
                        for i in range(self.rows) for j in range(i)))

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise DimensionMismatchError("trace of non-square matrix")
        return sum((self.entry(i, i) for i in range(self.rows)), Fraction(0))

    def inverse(self) -> "QMatrix":
        """Exact inverse by Gauss-Jordan elimination.

        Raises DegenerateFormError if singular.
        """
        n = self.rows
        if n != self.cols:
            raise DimensionMismatchError("inverse of non-square matrix")
        a = self.row_list()
        inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                raise DegenerateFormError("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            d = a[col][col]
            a[col] = [x / d for x in a[col]]
            inv[col] = [x / d for x in inv[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
        return QMatrix.from_rows(inv) if n else QMatrix(0, 0, [])

    def rank(self) -> int:
        a = self.row_list()
        r = 0
        for col in range(self.cols):
            piv = next((i for i in range(r, self.rows) if a[i][col] != 0), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            for i in range(r + 1, self.rows):
                if a[i][col]:
                    f = a[i][col] / a[r][col]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            r += 1
        return r

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [format_rational(e) for e in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "QMatrix":
        return cls(int(data["rows"]), int(data["cols"]),
                   [parse_rational(e) for e in data["entries"]])


# ---------------------------------------------------------------------------
# integer normal forms
# ---------------------------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple:
    """Return (x, y, g) with x*a + y*b == g = gcd(a, b), g the positive gcd."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def _echelon_insert_partial(pivots: dict, vec: list, npiv: int) -> list | None:
    """Reduce ``vec`` against pivot rows in place, inserting it if independent.

    ``pivots`` maps a pivot column (< npiv) to its row.  Returns the inserted
    row, or None if ``vec`` reduced to zero over the pivot columns.  Rows may
    be wider than the pivot range (augmented columns ride along).
    """
    width = len(vec)
    j = 0
    while j < npiv:
        if vec[j] == 0:
            j += 1
            continue
        row = pivots.get(j)
        if row is None:
            pivots[j] = vec
            return vec
        a, b = row[j], vec[j]
        if b % a == 0:
            q = b // a
            for jj in range(j, width):
                vec[jj] -= q * row[jj]
        else:
            x, y, g = _xgcd(a, b)
            ag, bg = a // g, b // g
            for jj in range(j, width):
                r, v = row[jj], vec[jj]
                row[jj] = x * r + y * v
                vec[jj] = ag * v - bg * r
        j += 1
    return None


def hnf_int(rows: Iterable[Sequence[int]], cols: int) -> list:
    """Canonical row Hermite normal form of the integer row span.

    Pivots are positive, entries above each pivot are reduced into
    [0, pivot), zero rows are dropped, and rows are ordered by pivot column.
    The result depends only on the row span, not on row order.
    """
    pivots: dict = {}
    for r in rows:
        _echelon_insert_partial(pivots, list(r), cols)
    cols_sorted = sorted(pivots)
    basis = [pivots[j] for j in cols_sorted]
    # normalize pivot signs
    for idx, j in enumerate(cols_sorted):
        if basis[idx][j] < 0:
            basis[idx] = [-x for x in basis[idx]]
    # Reduce entries above each pivot, in ascending pivot order: rows below
    # a pivot have zeros at all earlier pivot columns, so later reductions
    # cannot disturb columns already reduced.
    for idx in range(len(basis)):
        j = cols_sorted[idx]
        p = basis[idx][j]
        for up in range(idx):
            q = basis[up][j] // p
            if q:
                basis[up] = [x - q * y for x, y in zip(basis[up], basis[idx])]
    return basis


def kernel_int(rows: Sequence[Sequence[int]], cols: int) -> list:
    """Basis of {x integer row vector : x @ M == 0} for M with the given rows.

    Returned as the canonical HNF basis of the kernel lattice in Z^len(rows).
    """
    m = len(rows)
    pivots: dict = {}
    kernel = []
    for i, r in enumerate(rows):
        aug = list(r) + [0] * m
        aug[cols + i] = 1
        out = _echelon_insert_partial(pivots, aug, cols)
        if out is None:
            kernel.append(aug[cols:])
    return hnf_int(kernel, m)


def smith_invariants(rows: Sequence[Sequence[int]]) -> list:
    """Invariant factors d1 | d2 | ... of an integer matrix (nonzero only)."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    s = 0
    while s < m and s < n:
        # locate a nonzero entry in the trailing block
        pos = None
        best = None
        for i in range(s, m):
            for j in range(s, n):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best, pos = v, (i, j)
        if pos is None:
            break
        i0, j0 = pos
        a[s], a[i0] = a[i0], a[s]
        for row in a:
            row[s], row[j0] = row[j0], row[s]
        # Clear row and column s.  Exact multiples are subtracted without
        # touching the pivot row/column; otherwise a unimodular 2x2 transform
        # replaces the pivot by a strictly smaller gcd, so the loop terminates.
        while True:
            for i in range(s + 1, m):
                b = a[i][s]
                if not b:
                    continue
                p = a[s][s]
                if b % p == 0:
                    q = b // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[s])]
                else:
                    x, y, g = _xgcd(p, b)
                    pg, qg = p // g, b // g
                    rs, ri = a[s], a[i]
                    for j in range(s, n):
                        u, v = rs[j], ri[j]
                        rs[j] = x * u + y * v
                        ri[j] = pg * v - qg * u
            for j in range(s + 1, n):
                b = a[s][j]
                if not b:
                    continue
                p = a[s][s]
                if b % p == 0:
                    q = b // p
                    for row in a:
                        row[j] -= q * row[s]
                else:
                    x, y, g = _xgcd(p, b)
                    pg, qg = p // g, b // g
                    for row in a:
                        u, v = row[s], row[j]
                        row[s] = x * u + y * v
                        row[j] = pg * v - qg * u
            if all(a[i][s] == 0 for i in range(s + 1, m)) and \
               all(a[s][j] == 0 for j in range(s + 1, n)):
                # enforce divisibility of the trailing block by the pivot
                bad = None
                p = a[s][s]
                for i in range(s + 1, m):
                    for j in range(s + 1, n):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                for j in range(s, n):
                    a[s][j] += a[bad][j]
        diag.append(abs(a[s][s]))
        s += 1
    return [d for d in diag if d]


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

class ZLattice:
    """Free abelian subgroup of Q^n in canonical form.

    Stored as an integer HNF basis together with a minimal positive
    denominator: the lattice is ``rows / den``.  Canonicalization is
    idempotent, so equality is structural equality of the stored data.
    """

    __slots__ = ("ambient_dim", "den", "rows")

    def __init__(self, ambient_dim: int, den: int, rows: tuple) -> None:
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("ZLattice is immutable")

    @classmethod
    def from_rows(cls, ambient_dim: int, rows: Iterable[Sequence]) -> "ZLattice":
        """Canonicalize the Z-span of the given rational rows."""
        rational = [[Fraction(x) for x in row] for row in rows]
        for row in rational:
            if len(row) != ambient_dim:
                raise DimensionMismatchError(
                    f"row length {len(row)} != ambient_dim {ambient_dim}")
        den = 1
        for row in rational:
            for x in row:
                den = lcm(den, x.denominator)
        ints = [[int(x * den) for x in row] for row in rational]
        basis = hnf_int(ints, ambient_dim)
        g = den
        for row in basis:
            for x in row:
                if x:
                    g = gcd(g, x)
            if g == 1:
                break
        if g > 1:
            den //= g
            basis = [[x // g for x in row] for row in basis]
        return cls(ambient_dim, den, tuple(tuple(r) for r in basis))

    @classmethod
    def zero(cls, ambient_dim: int) -> "ZLattice":
        return cls(ambient_dim, 1, ())

    @classmethod
    def standard(cls, n: int) -> "ZLattice":
        return cls.from_rows(n, [[int(i == j) for j in range(n)]
                                 for i in range(n)])

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> QMatrix:
        """Canonical rational basis, one generator per row."""
        if not self.rows:
            return QMatrix(0, self.ambient_dim, [])
        return QMatrix.from_rows(
            [[Fraction(x, self.den) for x in row] for row in self.rows])

    def basis_rows(self) -> list:
        return [[Fraction(x, self.den) for x in row] for row in self.rows]

    def scale(self, c) -> "ZLattice":
        c = Fraction(c)
        if c == 0:
            return ZLattice.zero(self.ambient_dim)
        return ZLattice.from_rows(
            self.ambient_dim,
            [[c * Fraction(x, self.den) for x in row] for row in self.rows])

    def coordinates(self, vector: Sequence) -> list | None:
        """Integer coordinates of ``vector`` in the canonical basis, or None."""
        vec = [Fraction(x) for x in vector]
        if len(vec) != self.ambient_dim:
            raise DimensionMismatchError("vector has wrong length")
        scaled = [x * self.den for x in vec]
        if any(x.denominator != 1 for x in scaled):
            return None
        w = [int(x) for x in scaled]
        coords = []
        for row in self.rows:
            j = next((c for c, x in enumerate(row) if x), None)
            if j is None:  # pragma: no cover - no zero rows stored
                continue
            q, r = divmod(w[j], row[j])
            if r:
                return None
            coords.append(q)
            if q:
                w = [a - q * b for a, b in zip(w, row)]
        if any(w):
            return None
        return coords

    def __contains__(self, vector) -> bool:
        return self.coordinates(vector) is not None

    def __eq__(self, other) -> bool:
        return (isinstance(other, ZLattice)
                and self.ambient_dim == other.ambient_dim
                and self.den == other.den and self.rows == other.rows)

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.den, self.rows))

    def __repr__(self) -> str:
        return (f"ZLattice(dim={self.ambient_dim}, rank={self.rank}, "
                f"den={self.den})")

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim,
                "basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "ZLattice":
        mat = QMatrix.from_json(data["basis"])
        return cls.from_rows(int(data["ambient_dim"]), mat.row_list())


def hnf(matrix: QMatrix) -> QMatrix:
    """Canonical echelon basis of the integer row span of ``matrix``.

    Clears denominators, computes the row HNF, and restores the scale, so the
    output spans the same subgroup of Q^n as the input rows.  Deterministic
    and row-order independent.
    """
    lat = ZLattice.from_rows(matrix.cols, matrix.row_list())
    return lat.basis


def lattice_sum(a: ZLattice, b: ZLattice) -> ZLattice:
    """Smallest lattice containing both operands."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    return ZLattice.from_rows(a.ambient_dim, a.basis_rows() + b.basis_rows())


def lattice_intersect(a: ZLattice, b: ZLattice) -> ZLattice:
    """Largest lattice contained in both operands."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    n = a.ambient_dim
    den = lcm(a.den, b.den)
    fa, fb = den // a.den, den // b.den
    arows = [[x * fa for x in row] for row in a.rows]
    brows = [[x * fb for x in row] for row in b.rows]
    # Augmented rows [u | u] for u in A and [w | 0] for w in B, echelonized
    # with pivots on the left block only: a combination x*A + y*B with zero
    # left block satisfies x*A = -y*B, so its right block x*A lies in the
    # intersection, and every intersection element arises this way.
    pivots: dict = {}
    inter = []
    for u in arows:
        vec = list(u) + list(u)
        if _echelon_insert_partial(pivots, vec, n) is None and any(vec[n:]):
            inter.append(vec[n:])
    for w in brows:
        vec = list(w) + [0] * n
        if _echelon_insert_partial(pivots, vec, n) is None and any(vec[n:]):
            inter.append(vec[n:])
    return ZLattice.from_rows(n, [[Fraction(x, den) for x in row]
                                  for row in inter])


def quotient_invariants(a: ZLattice, b: ZLattice) -> list:
    """Elementary divisors of A/B for B <= A with equal rational span."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    coords = []
    for row in b.basis_rows():
        c = a.coordinates(row)
        if c is None:
            raise NotSublatticeError("B is not contained in A")
        coords.append(c)
    if b.rank != a.rank:
        raise SpanMismatchError("A/B is infinite (ranks differ)")
    if a.rank == 0:
        return []
    return smith_invariants(coords)


def quotient_exponent(a: ZLattice, b: ZLattice) -> int:
    """Least m > 0 with m*A contained in B (for B <= A, equal span)."""
    inv = quotient_invariants(a, b)
    return inv[-1] if inv else 1


def quotient_index(a: ZLattice, b: ZLattice) -> int:
    """Index [A : B] for B <= A with equal rational span."""
    inv = quotient_invariants(a, b)
    out = 1
    for d in inv:
        out *= d
    return out


def membership(vector: Sequence, a: ZLattice) -> bool:
    """Exact test whether ``vector`` is an integral combination of A's basis."""
    return a.coordinates(vector) is not None


def dual_lattice(a: ZLattice, gram: QMatrix) -> ZLattice:
    """Dual of A inside its own rational span, w.r.t. the given form.

    Returns {u in span(A) : <u, x> in Z for all x in A}.  The form must be
    symmetric and nondegenerate on span(A); the zero lattice is self-dual.
    """
    if gram.rows != a.ambient_dim or gram.cols != a.ambient_dim:
        raise DimensionMismatchError("form has wrong shape")
    if not gram.is_symmetric():
        raise ValueError("form is not symmetric")
    if a.rank == 0:
        return a
    r = a.basis
    m = r @ gram @ r.transpose()
    try:
        minv = m.inverse()
    except DegenerateFormError:
        raise DegenerateFormError("form is degenerate on the span of A")
    dual_rows = (minv @ r).row_list()
    return ZLattice.from_rows(a.ambient_dim, dual_rows)
