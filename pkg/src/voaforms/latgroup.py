"""Sign actions of elementary abelian 2-groups on lattices.

A SignedAction presents a group E of commuting integral involutions by a
generating list; characters assign a sign to each generator.  The module
computes eigenlattices, total eigenlattices with their exponent bound,
idempotent projections in the group algebra, and intersections of lattice
images under finite integer matrix groups.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Sequence

from voaforms.exact import (
    QMatrix,
    ZLattice,
    DimensionMismatchError,
    kernel_int,
    lattice_intersect,
    lattice_sum,
    quotient_exponent,
)


class ActionError(ValueError):
    """The presented matrices do not define a legal sign action."""


class PreservationError(ValueError):
    """The action does not map the given lattice into itself."""


class GroupClosureError(ValueError):
    """Matrix group closure exceeded the configured size bound."""


def _mat_tuple(m: Sequence[Sequence[int]]) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in m)


def _mat_mul(a: tuple, b: tuple) -> tuple:
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n))
                       for j in range(n)) for i in range(n))


def _mat_identity(n: int) -> tuple:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def apply_matrix(m: Sequence[Sequence], vector: Sequence) -> list:
    """Image of a (row) vector under the matrix acting on coordinates."""
    return [sum(m[i][j] * vector[j] for j in range(len(vector)))
            for i in range(len(m))]


class SignedAction:
    """Commuting integral involutions generating E of presented rank r."""

    __slots__ = ("ambient_dim", "generators", "rank")

    def __init__(self, ambient_dim: int, generators: Iterable) -> None:
        gens = tuple(_mat_tuple(g) for g in generators)
        ident = _mat_identity(ambient_dim)
        for g in gens:
            if len(g) != ambient_dim or any(len(r) != ambient_dim for r in g):
                raise ActionError("generator has wrong shape")
            if _mat_mul(g, g) != ident:
                raise ActionError("generator does not square to the identity")
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                if _mat_mul(g, h) != _mat_mul(h, g):
                    raise ActionError("generators do not commute")
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "rank", len(gens))

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("SignedAction is immutable")

    def elements(self):
        """All 2^r subset products, as (subset-mask, matrix) pairs."""
        n = self.ambient_dim
        out = []
        for mask in range(1 << self.rank):
            m = _mat_identity(n)
            for i in range(self.rank):
                if mask >> i & 1:
                    m = _mat_mul(m, self.generators[i])
            out.append((mask, m))
        return out

    def preserves(self, lattice: ZLattice) -> bool:
        rows = lattice.basis_rows()
        return all(apply_matrix(g, row) in lattice
                   for g in self.generators for row in rows)

    def to_json(self) -> dict:
        return {"dim": self.ambient_dim,
                "generators": [[x for row in g for x in row]
                               for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "SignedAction":
        n = int(data["dim"])
        gens = []
        for flat in data["generators"]:
            if len(flat) != n * n:
                raise ActionError("generator entry count != dim^2")
            gens.append([flat[i * n:(i + 1) * n] for i in range(n)])
        return cls(n, gens)


class Character:
    """Sign vector on the chosen generators of E."""

    __slots__ = ("signs",)

    def __init__(self, signs: Iterable[int]) -> None:
        sg = tuple(int(s) for s in signs)
        if any(s not in (1, -1) for s in sg):
            raise ValueError("character values must be +1 or -1")
        object.__setattr__(self, "signs", sg)

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("Character is immutable")

    def __eq__(self, other):
        return isinstance(other, Character) and self.signs == other.signs

    def __hash__(self):
        return hash(self.signs)

    def __repr__(self):
        return f"Character{self.signs}"

    def value_on_mask(self, mask: int) -> int:
        v = 1
        for i, s in enumerate(self.signs):
            if mask >> i & 1 and s == -1:
                v = -v
        return v

    @staticmethod
    def all_characters(rank: int):
        return [Character(signs) for signs in iproduct((1, -1), repeat=rank)]

    @staticmethod
    def trivial(rank: int) -> "Character":
        return Character((1,) * rank)


def eigenlattice(lattice: ZLattice, action: SignedAction,
                 char: Character) -> ZLattice:
    """Sublattice on which every generator acts by the character's sign."""
    if len(char.signs) != action.rank:
        raise ValueError("character length != action rank")
    if not action.preserves(lattice):
        raise PreservationError("action does not preserve the lattice")
    n = lattice.ambient_dim
    if lattice.rank == 0:
        return lattice
    h = [list(r) for r in lattice.rows]
    # x = y*H/D lies in the eigenlattice iff y * (H*(g^T - s*I)) = 0 for all
    # generators; stack the constraint blocks horizontally.
    blocks = []
    for g, s in zip(action.generators, char.signs):
        block = []
        for row in h:
            img = apply_matrix(g, row)
            block.append([img[j] - s * row[j] for j in range(n)])
        blocks.append(block)
    stacked = [sum((blocks[b][i] for b in range(len(blocks))), [])
               for i in range(len(h))]
    if not blocks:
        return lattice
    ker = kernel_int(stacked, len(stacked[0]))
    rows = []
    for y in ker:
        vec = [Fraction(sum(y[i] * h[i][j] for i in range(len(h))),
                        lattice.den) for j in range(n)]
        rows.append(vec)
    return ZLattice.from_rows(n, rows)


def total_eigenlattice(lattice: ZLattice, action: SignedAction) -> ZLattice:
    """Internal direct sum of all 2^r eigenlattices."""
    parts = [eigenlattice(lattice, action, ch)
             for ch in Character.all_characters(action.rank)]
    total = ZLattice.zero(lattice.ambient_dim)
    rank_sum = 0
    for p in parts:
        total = lattice_sum(total, p)
        rank_sum += p.rank
    if total.rank != rank_sum:
        raise ActionError("eigenlattice sum is not direct")
    return total


def tel_exponent_check(lattice: ZLattice, action: SignedAction):
    """(2^r L <= Tel(L), exact exponent of L/Tel(L)).

    The containment holds for every preserved lattice; a False here would
    mean the implementation is broken, so it is asserted.
    """
    tel = total_eigenlattice(lattice, action)
    e = quotient_exponent(lattice, tel)
    ok = (1 << action.rank) % e == 0
    if not ok:  # pragma: no cover - impossible for preserved lattices
        raise ActionError(f"exponent {e} does not divide 2^{action.rank}")
    return ok, e


def idempotent_project(vector: Sequence, action: SignedAction,
                       char: Character) -> list:
    """Projection 2^-r * sum_g char(g) g . vector onto the eigenspace."""
    n = action.ambient_dim
    if len(vector) != n:
        raise DimensionMismatchError("vector has wrong length")
    vec = [Fraction(x) for x in vector]
    acc = [Fraction(0)] * n
    for mask, m in action.elements():
        s = char.value_on_mask(mask)
        img = apply_matrix(m, vec)
        for j in range(n):
            acc[j] += s * img[j]
    scale = Fraction(1, 1 << action.rank)
    return [scale * x for x in acc]


def image_lattice(matrix: Sequence[Sequence], lattice: ZLattice) -> ZLattice:
    """The lattice g.L for an invertible rational matrix g."""
    rows = [apply_matrix(matrix, r) for r in lattice.basis_rows()]
    return ZLattice.from_rows(lattice.ambient_dim, rows)


def close_matrix_group(mats: Iterable, dim: int, bound: int = 1024) -> list:
    """All products of the given matrices, identity included.

    Raises GroupClosureError if more than ``bound`` distinct elements appear.
    """
    gens = [_mat_tuple(m) for m in mats]
    ident = _mat_identity(dim)
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = _mat_mul(m, g)
                if prod not in group:
                    group.add(prod)
                    nxt.append(prod)
                    if len(group) > bound:
                        raise GroupClosureError(
                            f"matrix group exceeds {bound} elements")
        frontier = nxt
    return sorted(group)


def invariant_intersection(lattice: ZLattice, matrices: Iterable,
                           bound: int = 1024):
    """Intersection of g.L over the group generated by the given matrices.

    Returns (intersection, exponent of L over it).  Each matrix must be
    invertible over Q.
    """
    mats = [_mat_tuple(m) for m in matrices]
    n = lattice.ambient_dim
    for m in mats:
        q = QMatrix.from_rows([[Fraction(x) for x in row] for row in m])
        if q.rank() < n:
            raise ActionError("matrix is singular")
    group = close_matrix_group(mats, n, bound)
    inter = lattice
    for g in group:
        inter = lattice_intersect(inter, image_lattice(g, lattice))
    e = quotient_exponent(lattice, inter)
    for g in mats:
        for row in inter.basis_rows():
            if apply_matrix(g, row) not in inter:  # pragma: no cover
                raise ActionError("intersection is not invariant")
    return inter, e
