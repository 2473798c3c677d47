"""Truncated lattice vertex operator algebra kernel.

The Fock space of a positive definite even lattice is spanned, in each
degree, by monomials in creation modes applied to lattice-translate ground
states.  This module enumerates those graded bases up to a cutoff, evaluates
the vertex products a_k b exactly over Q, carries the invariant bilinear form
normalized by <vac, vac> = 1, and exposes the Virasoro operators built from
the canonical quadratic element.

Conventions.  A monomial is a multiset of modes gamma_i(-n) (n >= 1, i a
basis index) applied to the ground state e^alpha; its degree is the sum of
the n plus half the norm of alpha.  Products are computed by expanding the
normal-ordered operator: derivative factors for the modes, the two
exponential series for the tail, the tail sign from the bimultiplicative
two-cocycle, and the z-power from the tail pairing.  The bilinear form is
the one the invariance identity forces once <vac, vac> = 1: one-mode
adjoints pick up a sign, so e.g. <gamma(-1), gamma(-1)> = -<gamma, gamma>,
and <e^a, e^-a> = (-1)^(|a|^2/2) eps(a, -a).  ``invariance_identity_check``
verifies that contract coefficientwise and doubles as the construction's
oracle in the test suite.

All values are immutable; the memo tables are pure caches (a concurrent
reader sees exactly what a sequential run would produce).
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb, factorial, isqrt
from typing import Iterable, NamedTuple, Sequence

from voaforms.exact import QMatrix, format_rational, parse_rational


class CutoffExceededError(ValueError):
    """A product or operator would land beyond the representable degrees."""


class NotHomogeneousError(ValueError):
    """A homogeneous element was required."""


class ElementParseError(ValueError):
    """An element literal does not match the term grammar."""


class FockMonomial(NamedTuple):
    """Creation-mode multiset (sorted (n, i) pairs) over a lattice tail."""

    modes: tuple
    tail: tuple


class GradedVector:
    """Finite rational combination of Fock monomials below a cutoff."""

    __slots__ = ("terms", "cutoff", "truncated")

    def __init__(self, terms: dict, cutoff: int, truncated: bool = False):
        clean = {m: Fraction(c) for m, c in terms.items() if c}
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "truncated", truncated)

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("GradedVector is immutable")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GradedVector") -> "GradedVector":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return GradedVector(out, self.cutoff,
                            self.truncated or other.truncated)

    def __sub__(self, other: "GradedVector") -> "GradedVector":
        return self + other.scale(-1)

    def __neg__(self) -> "GradedVector":
        return self.scale(-1)

    def scale(self, c) -> "GradedVector":
        c = Fraction(c)
        if not c:
            return GradedVector({}, self.cutoff, self.truncated)
        return GradedVector({m: c * v for m, v in self.terms.items()},
                            self.cutoff, self.truncated)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedVector)
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"GradedVector({len(self.terms)} terms, cutoff={self.cutoff})"


class EvenLattice:
    """Positive definite even lattice given by its integer Gram matrix."""

    __slots__ = ("rank", "gram", "_sq", "_shorts")

    def __init__(self, gram: Sequence[Sequence[int]]) -> None:
        g = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("gram matrix is not square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValueError("gram matrix is not symmetric")
        if any(g[i][i] % 2 for i in range(n)):
            raise ValueError("lattice not even: odd diagonal entry")
        object.__setattr__(self, "rank", n)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "_sq", self._completed_squares(g, n))
        object.__setattr__(self, "_shorts", {})

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("EvenLattice is immutable")

    @staticmethod
    def _completed_squares(g, n):
        q = [[Fraction(g[i][j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            if q[i][i] <= 0:
                raise ValueError("gram matrix is not positive definite")
            for j in range(i + 1, n):
                q[j][i] = q[i][j]
                q[i][j] = q[i][j] / q[i][i]
            for k in range(i + 1, n):
                for l in range(k, n):
                    q[k][l] -= q[k][i] * q[i][l]
        return tuple(tuple(row) for row in q)

    def inner(self, a: Sequence[int], b: Sequence[int]) -> int:
        g = self.gram
        return sum(g[i][j] * a[i] * b[j]
                   for i in range(self.rank) for j in range(self.rank))

    def inner_basis(self, a: Sequence[int], j: int) -> int:
        """<a, gamma_j> for integer coordinates a."""
        g = self.gram
        return sum(g[i][j] * a[i] for i in range(self.rank))

    def norm(self, a: Sequence[int]) -> int:
        return self.inner(a, a)

    def short_vectors(self, max_norm: int) -> list:
        """All lattice vectors of norm <= max_norm, sorted by (norm, coords)."""
        if max_norm < 0:
            return []
        hit = self._shorts.get(max_norm)
        if hit is not None:
            return hit
        n = self.rank
        q = self._sq
        found = []

        def bounds(center: Fraction, budget: Fraction, qii: Fraction):
            # integers x with qii*(x + center)^2 <= budget
            t = budget / qii
            num, den = t.numerator, t.denominator
            root = Fraction(isqrt(num * den), den)
            lo = -center - root - 1
            hi = -center + root + 1
            lo_i = int(lo) - 1
            hi_i = int(hi) + 1
            return [x for x in range(lo_i, hi_i + 1)
                    if qii * (x + center) ** 2 <= budget]

        def rec(i: int, budget: Fraction, partial: list):
            if i < 0:
                vec = tuple(partial[::-1])
                found.append(vec)
                return
            center = sum((q[i][j] * partial[n - 1 - j]
                          for j in range(i + 1, n)), Fraction(0))
            for x in bounds(center, budget, q[i][i]):
                used = q[i][i] * (x + center) ** 2
                rec(i - 1, budget - used, partial + [x])

        rec(n - 1, Fraction(max_norm), [])
        found.sort(key=lambda v: (self.norm(v), v))
        self._shorts[max_norm] = found
        return found

    def to_json(self) -> dict:
        return {"rank": self.rank, "gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, data: dict) -> "EvenLattice":
        return cls(data["gram"])


def _mode_multisets(total: int, rank: int) -> list:
    """All multisets of (n, i) pairs with sum of n == total, canonical order."""
    results = []

    def rec(remaining, max_n, max_i, acc):
        if remaining == 0:
            results.append(tuple(acc[::-1]))
            return
        for n in range(min(remaining, max_n), 0, -1):
            itop = max_i if n == max_n else rank - 1
            for i in range(itop, -1, -1):
                rec(remaining - n, n, i, acc + [(n, i)])

    rec(total, total, rank - 1, [])
    return results


def _remove_one(modes: tuple, pair: tuple) -> tuple:
    idx = modes.index(pair)
    return modes[:idx] + modes[idx + 1:]


class TruncatedVOA:
    """Lattice VOA truncated at a maximum degree, with exact products."""

    def __init__(self, lattice: EvenLattice, cutoff: int) -> None:
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        self.lattice = lattice
        self.cutoff = cutoff
        self._bases = {}
        self._base_index = {}
        self._degree = {}
        self._prod = {}
        self._eminus = {}
        self._heis = {}
        self._pairform = {}
        self._formmat = {}
        self._omega = None
        self._l1_chain = {}
        # dim V_0 = 1 falls out of evenness + positive definiteness: the only
        # vector of norm 0 is 0 and there is no mode of degree 0.
        if len(self.graded_basis(0)) != 1:  # pragma: no cover - structural
            raise ValueError("degree-0 space is not one-dimensional")

    # -- grading ------------------------------------------------------------

    def epsilon(self, alpha: Sequence[int], beta: Sequence[int]) -> int:
        """Bimultiplicative cocycle sign: +1 on ordered basis pairs."""
        g = self.lattice.gram
        n = self.lattice.rank
        s = sum(g[i][j] * alpha[i] * beta[j]
                for i in range(n) for j in range(i))
        return -1 if s % 2 else 1

    def mono_degree(self, mono: FockMonomial) -> int:
        d = self._degree.get(mono)
        if d is None:
            d = sum(n for n, _ in mono.modes) + self.lattice.norm(mono.tail) // 2
            self._degree[mono] = d
        return d

    def graded_basis(self, degree: int) -> tuple:
        """Canonically ordered monomial basis of the given degree."""
        if degree > self.cutoff:
            raise CutoffExceededError(
                f"degree {degree} beyond cutoff {self.cutoff}")
        hit = self._bases.get(degree)
        if hit is not None:
            return hit
        monos = []
        for tail in self.lattice.short_vectors(2 * degree):
            rem = degree - self.lattice.norm(tail) // 2
            for modes in _mode_multisets(rem, self.lattice.rank):
                monos.append(FockMonomial(modes, tail))
        basis = tuple(monos)
        self._bases[degree] = basis
        self._base_index[degree] = {m: i for i, m in enumerate(basis)}
        return basis

    def dim(self, degree: int) -> int:
        return len(self.graded_basis(degree))

    def basis_index(self, degree: int) -> dict:
        self.graded_basis(degree)
        return self._base_index[degree]

    # -- element constructors ------------------------------------------------

    def vacuum_monomial(self) -> FockMonomial:
        return FockMonomial((), (0,) * self.lattice.rank)

    def vacuum(self) -> GradedVector:
        return GradedVector({self.vacuum_monomial(): Fraction(1)}, self.cutoff)

    def monomial_vector(self, modes: Iterable, tail: Sequence[int],
                        coeff=1) -> GradedVector:
        mono = FockMonomial(tuple(sorted(tuple(m) for m in modes)),
                            tuple(int(t) for t in tail))
        if self.mono_degree(mono) > self.cutoff:
            raise CutoffExceededError("monomial degree beyond cutoff")
        return GradedVector({mono: Fraction(coeff)}, self.cutoff)

    def degrees_of(self, v: GradedVector) -> list:
        return sorted({self.mono_degree(m) for m in v.terms})

    def degree_of(self, v: GradedVector) -> int:
        ds = self.degrees_of(v)
        if len(ds) != 1:
            raise NotHomogeneousError(f"degrees present: {ds}")
        return ds[0]

    def homogeneous_components(self, v: GradedVector) -> dict:
        comps = {}
        for m, c in v.terms.items():
            comps.setdefault(self.mono_degree(m), {})[m] = c
        return {d: GradedVector(t, self.cutoff)
                for d, t in sorted(comps.items())}

    def coords(self, v: GradedVector):
        """(degree, coefficient row over the graded basis) for homogeneous v."""
        d = self.degree_of(v)
        idx = self.basis_index(d)
        row = [Fraction(0)] * self.dim(d)
        for m, c in v.terms.items():
            row[idx[m]] = c
        return d, row

    def vector_from_coords(self, degree: int, row: Sequence) -> GradedVector:
        basis = self.graded_basis(degree)
        if len(row) != len(basis):
            raise ValueError("coefficient row has wrong length")
        return GradedVector({m: Fraction(c) for m, c in zip(basis, row) if c},
                            self.cutoff)

    # -- exponential series ---------------------------------------------------

    def _eminus_series(self, alpha: tuple) -> list:
        """Creation exponential by output degree: [degree] -> {modes: coeff}."""
        hit = self._eminus.get(alpha)
        if hit is not None:
            return hit
        nmax = self.cutoff
        series = [dict() for _ in range(nmax + 1)]
        series[0][()] = Fraction(1)
        rank = self.lattice.rank
        for n in range(1, nmax + 1):
            jmax = nmax // n
            pows = [{(): Fraction(1)}]
            for _ in range(jmax):
                prev = pows[-1]
                cur = {}
                for ms, c in prev.items():
                    for i in range(rank):
                        ai = alpha[i]
                        if not ai:
                            continue
                        key = tuple(sorted(ms + ((n, i),)))
                        cur[key] = cur.get(key, Fraction(0)) + c * ai
                pows.append(cur)
            nxt = [dict() for _ in range(nmax + 1)]
            for d in range(nmax + 1):
                if not series[d]:
                    continue
                for j in range(0, (nmax - d) // n + 1):
                    if not pows[j]:
                        continue
                    fac = Fraction(1, n ** j * factorial(j))
                    for ms, c in series[d].items():
                        for ms2, c2 in pows[j].items():
                            key = tuple(sorted(ms + ms2))
                            tgt = nxt[d + n * j]
                            tgt[key] = tgt.get(key, Fraction(0)) + c * c2 * fac
            series = nxt
        series = [{k: v for k, v in layer.items() if v} for layer in series]
        self._eminus[alpha] = series
        return series

    def _eplus_expand(self, alpha: tuple, modes: tuple) -> list:
        """Annihilation exponential applied to a multiset: [(zpow, modes, c)]."""
        avals = [self.lattice.inner_basis(alpha, j)
                 for j in range(self.lattice.rank)]
        out = {(0, modes): Fraction(1)}
        layer = dict(out)
        j = 0
        while layer:
            j += 1
            nxt = {}
            for (zp, ms), c in layer.items():
                seen = set()
                for pair in ms:
                    if pair in seen:
                        continue
                    seen.add(pair)
                    m_, i_ = pair
                    a = avals[i_]
                    if not a:
                        continue
                    mult = ms.count(pair)
                    key = (zp - m_, _remove_one(ms, pair))
                    nxt[key] = nxt.get(key, Fraction(0)) - c * a * mult
            layer = {k: v / j for k, v in nxt.items() if v}
            for k, v in layer.items():
                out[k] = out.get(k, Fraction(0)) + v
        return [(zp, ms, c) for (zp, ms), c in out.items() if c]

    # -- vertex products ------------------------------------------------------

    def pair_products(self, ma: FockMonomial, mb: FockMonomial) -> dict:
        """All products ma_k mb landing within the cutoff: {k: {mono: coeff}}.

        Much of the library reduces to this kernel; results are memoized per
        ordered monomial pair.
        """
        key = (ma, mb)
        hit = self._prod.get(key)
        if hit is not None:
            return hit
        lat = self.lattice
        gram = lat.gram
        rank = lat.rank
        alpha, beta = ma.tail, mb.tail
        tpair = lat.inner(alpha, beta)
        sign = self.epsilon(alpha, beta)
        tau = tuple(a + b for a, b in zip(alpha, beta))
        out: dict = {}
        qtau2 = lat.norm(tau)
        if qtau2 // 2 <= self.cutoff:
            qtau = qtau2 // 2
            budget = self.cutoff - qtau
            # annihilation exponential on the right modes
            stage = [(zp, ms, (), c)
                     for (zp, ms, c) in self._eplus_expand(alpha, mb.modes)]
            # derivative factor per left mode: creation, zero-mode, or
            # annihilation part, normal ordering keeps created modes immune
            # to later annihilators
            for n_, i_ in ma.modes:
                sgn = -1 if (n_ - 1) % 2 else 1
                z0 = lat.inner_basis(beta, i_)
                nxt = []
                for zp, ms, created, c in stage:
                    if z0:
                        nxt.append((zp - n_, ms, created, c * sgn * z0))
                    seen = set()
                    for pair in ms:
                        if pair in seen:
                            continue
                        seen.add(pair)
                        m2, j2 = pair
                        gij = gram[i_][j2]
                        if not gij:
                            continue
                        coeff = sgn * comb(m2 + n_ - 1, n_ - 1) * m2 * gij \
                            * ms.count(pair)
                        nxt.append((zp - m2 - n_, _remove_one(ms, pair),
                                    created, c * coeff))
                    room = budget - sum(p for p, _ in created)
                    for p in range(n_, room + 1):
                        cf = comb(p - 1, n_ - 1)
                        nxt.append((zp + p - n_, ms, created + ((p, i_),),
                                    c * cf))
                stage = nxt
            # creation exponential and assembly
            eser = self._eminus_series(alpha)
            for zp, ms, created, c in stage:
                mdeg = sum(n for n, _ in ms) + sum(p for p, _ in created)
                if mdeg > budget:
                    continue
                head = ms + created
                for edeg in range(0, budget - mdeg + 1):
                    for emodes, ec in eser[edeg].items():
                        mono = FockMonomial(tuple(sorted(head + emodes)), tau)
                        k = -(tpair + zp + edeg) - 1
                        bucket = out.setdefault(k, {})
                        val = bucket.get(mono, Fraction(0)) + sign * c * ec
                        if val:
                            bucket[mono] = val
                        elif mono in bucket:
                            del bucket[mono]
        out = {k: b for k, b in out.items() if b}
        self._prod[key] = out
        return out

    def vertex_product(self, a: GradedVector, k: int, b: GradedVector,
                       truncate: str = "error") -> GradedVector:
        """The product a_k b; degrees above the cutoff error or drop."""
        if truncate not in ("error", "drop"):
            raise ValueError("truncate must be 'error' or 'drop'")
        out: dict = {}
        truncated = False
        for m1, c1 in a.terms.items():
            d1 = self.mono_degree(m1)
            for m2, c2 in b.terms.items():
                d2 = self.mono_degree(m2)
                target = d1 + d2 - k - 1
                if target > self.cutoff:
                    if truncate == "error":
                        raise CutoffExceededError(
                            f"a_{k} b has degree {target} > cutoff "
                            f"{self.cutoff}")
                    truncated = True
                    continue
                if target < 0:
                    continue
                bucket = self.pair_products(m1, m2).get(k)
                if not bucket:
                    continue
                cc = c1 * c2
                for mono, c in bucket.items():
                    out[mono] = out.get(mono, Fraction(0)) + cc * c
        return GradedVector(out, self.cutoff, truncated)

    # -- bilinear form ---------------------------------------------------------

    def _heis_pair(self, ma: tuple, mb: tuple) -> Fraction:
        if len(ma) != len(mb):
            return Fraction(0)
        if not ma:
            return Fraction(1)
        key = (ma, mb)
        hit = self._heis.get(key)
        if hit is not None:
            return hit
        n_, i_ = ma[0]
        rest = ma[1:]
        total = Fraction(0)
        seen = set()
        for pair in mb:
            if pair in seen:
                continue
            seen.add(pair)
            m2, j2 = pair
            if m2 != n_:
                continue
            g = self.lattice.gram[i_][j2]
            if not g:
                continue
            total += Fraction(-n_ * g * mb.count(pair)) * \
                self._heis_pair(rest, _remove_one(mb, pair))
        self._heis[key] = total
        return total

    def pair_form(self, ma: FockMonomial, mb: FockMonomial) -> Fraction:
        key = (ma, mb)
        hit = self._pairform.get(key)
        if hit is None:
            if any(a + b for a, b in zip(ma.tail, mb.tail)):
                hit = Fraction(0)
            else:
                neg = tuple(-t for t in ma.tail)
                s = self.epsilon(ma.tail, neg)
                if (self.lattice.norm(ma.tail) // 2) % 2:
                    s = -s
                hit = s * self._heis_pair(ma.modes, mb.modes)
            self._pairform[key] = hit
        return hit

    def bilinear_form(self, u: GradedVector, v: GradedVector) -> Fraction:
        total = Fraction(0)
        for m1, c1 in u.terms.items():
            for m2, c2 in v.terms.items():
                f = self.pair_form(m1, m2)
                if f:
                    total += c1 * c2 * f
        return total

    def form_matrix(self, degree: int) -> list:
        """Gram matrix of the invariant form on graded_basis(degree)."""
        hit = self._formmat.get(degree)
        if hit is None:
            basis = self.graded_basis(degree)
            hit = [[self.pair_form(a, b) for b in basis] for a in basis]
            self._formmat[degree] = hit
        return hit

    # -- Virasoro ---------------------------------------------------------------

    def virasoro_element(self) -> GradedVector:
        """Canonical degree-2 element whose modes give the L operators."""
        if self._omega is None:
            g = QMatrix.from_rows([list(r) for r in self.lattice.gram])
            ginv = g.inverse()
            terms: dict = {}
            for i in range(self.lattice.rank):
                for j in range(self.lattice.rank):
                    c = Fraction(1, 2) * ginv.entry(i, j)
                    if not c:
                        continue
                    mono = FockMonomial(tuple(sorted(((1, i), (1, j)))),
                                        (0,) * self.lattice.rank)
                    terms[mono] = terms.get(mono, Fraction(0)) + c
            self._omega = GradedVector(terms, self.cutoff)
        return self._omega

    def L_apply(self, n: int, v: GradedVector,
                truncate: str = "error") -> GradedVector:
        """L(n) v realized as omega_{n+1} v."""
        return self.vertex_product(self.virasoro_element(), n + 1, v,
                                   truncate)

    def divided_translate(self, v: GradedVector, n: int) -> GradedVector:
        """v_{-n-1} vac, which equals L(-1)^n v / n! exactly."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        return self.vertex_product(v, -n - 1, self.vacuum())

    def is_quasi_primary(self, v: GradedVector) -> bool:
        return self.L_apply(1, v).is_zero()

    # -- invariance identity -----------------------------------------------------

    def _raising_chain(self, v: GradedVector) -> list:
        """[v, L(1)v, L(1)^2 v, ...] up to the first zero (v homogeneous)."""
        key = frozenset(v.terms.items())
        hit = self._l1_chain.get(key)
        if hit is not None:
            return hit
        chain = [v]
        while not chain[-1].is_zero():
            chain.append(self.L_apply(1, chain[-1]))
        self._l1_chain[key] = chain
        return chain

    def invariance_identity_check(self, a: GradedVector, u: GradedVector,
                                  v: GradedVector) -> bool:
        """Coefficientwise comparison of the two sides of the adjoint identity.

        For every representable k, <a_k u, v> must equal the alternating sum
        sum_n (-1)^deg(a)/n! <u, (L(1)^n a)_{2 deg(a) - n - k - 2} v> taken
        over the homogeneous components of a.  Degree filtering keeps every
        intermediate inside the cutoff, so the comparison is exact.
        """
        acomps = self.homogeneous_components(a)
        ucomps = self.homogeneous_components(u)
        vcomps = self.homogeneous_components(v)
        chains = {da: self._raising_chain(ac) for da, ac in acomps.items()}
        ks = set()
        for da in acomps:
            for du in ucomps:
                for dv in vcomps:
                    ks.add(da + du - dv - 1)
        for k in sorted(ks):
            lhs = Fraction(0)
            rhs = Fraction(0)
            for da, ac in acomps.items():
                for du, uc in ucomps.items():
                    dv = da + du - k - 1
                    vc = vcomps.get(dv)
                    if vc is None:
                        continue
                    lhs += self.bilinear_form(
                        self.vertex_product(ac, k, uc), vc)
                    sgn = -1 if da % 2 else 1
                    for n, an in enumerate(chains[da]):
                        if an.is_zero():
                            break
                        m = 2 * da - n - k - 2
                        prod = self.vertex_product(an, m, vc)
                        rhs += Fraction(sgn, factorial(n)) * \
                            self.bilinear_form(uc, prod)
            if lhs != rhs:
                return False
        return True

    # -- element literals -----------------------------------------------------------

    _TERM_H = re.compile(r"^h\(\s*(\d+)\s*,\s*(-\d+)\s*\)(?:\^(\d+))?$")
    _TERM_E = re.compile(r"^e\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)$")

    def format_element(self, v: GradedVector) -> str:
        """Canonical literal for an element; inverse of parse_element."""
        if v.is_zero():
            return "0"
        keyed = []
        for mono, coeff in v.terms.items():
            d = self.mono_degree(mono)
            keyed.append(((d, self.basis_index(d)[mono]), mono, coeff))
        keyed.sort(key=lambda x: x[0])
        parts = []
        for _, mono, coeff in keyed:
            factors = [format_rational(coeff)]
            i = 0
            modes = mono.modes
            while i < len(modes):
                n_, c_ = modes[i]
                j = i
                while j < len(modes) and modes[j] == modes[i]:
                    j += 1
                exp = j - i
                fac = f"h({c_ + 1},-{n_})"
                if exp > 1:
                    fac += f"^{exp}"
                factors.append(fac)
                i = j
            factors.append("e(" + ",".join(str(t) for t in mono.tail) + ")")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def parse_element(self, text: str) -> GradedVector:
        text = text.strip()
        if text == "0":
            return GradedVector({}, self.cutoff)
        terms: dict = {}
        for raw in text.split("+"):
            raw = raw.strip()
            if not raw:
                raise ElementParseError("empty term")
            pieces = [p.strip() for p in raw.split("*")]
            try:
                coeff = parse_rational(pieces[0])
            except ValueError:
                raise ElementParseError(
                    f"bad coefficient {pieces[0]!r}") from None
            modes = []
            tail = None
            for piece in pieces[1:]:
                mh = self._TERM_H.match(piece)
                if mh:
                    i_ = int(mh.group(1)) - 1
                    n_ = -int(mh.group(2))
                    exp = int(mh.group(3) or 1)
                    if not (0 <= i_ < self.lattice.rank):
                        raise ElementParseError(
                            f"mode index out of range in {piece!r}")
                    if n_ < 1:
                        raise ElementParseError(
                            f"mode order must be negative in {piece!r}")
                    modes.extend([(n_, i_)] * exp)
                    continue
                me = self._TERM_E.match(piece)
                if me:
                    if tail is not None:
                        raise ElementParseError("two tails in one term")
                    tail = tuple(int(x) for x in me.group(1).split(","))
                    if len(tail) != self.lattice.rank:
                        raise ElementParseError(
                            f"tail length != rank in {piece!r}")
                    continue
                raise ElementParseError(f"unrecognized factor {piece!r}")
            if tail is None:
                raise ElementParseError(f"term {raw!r} lacks a tail factor")
            mono = FockMonomial(tuple(sorted(modes)), tail)
            if self.mono_degree(mono) > self.cutoff:
                raise CutoffExceededError(
                    f"term {raw!r} has degree beyond cutoff {self.cutoff}")
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        return GradedVector(terms, self.cutoff)
