"""Integral forms inside truncated lattice VOAs.

A TruncatedForm is a degree-indexed family of lattices in graded-basis
coordinates, together with the generating data it was saturated from.  The
operations here generate forms by closing generator sets under all products
landing below the cutoff, certify lattice integrality degree by degree,
compute dual families and their stability under the raising operators, run
the two rescaling constructions that turn nearly-integral data into integral
data, and intersect or decompose forms under finite automorphism groups.

Every certificate produced here is truncation-scoped: it speaks about
degrees up to the host's cutoff and says so explicitly in its ``scope``
field.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from voaforms.exact import (
    DegenerateFormError,
    QMatrix,
    ZLattice,
    dual_lattice,
    format_rational,
    kernel_int,
    lattice_intersect,
    lattice_sum,
    quotient_exponent,
)
from voaforms.latgroup import (
    Character,
    SignedAction,
    apply_matrix,
    close_matrix_group,
    image_lattice,
)
from voaforms.voa import (
    GradedVector,
    NotHomogeneousError,
    TruncatedVOA,
)


class FormError(ValueError):
    """Base class for integral-form failures."""


class SaturationError(FormError):
    """Product closure did not stabilize within the iteration bound."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class PreconditionError(FormError):
    """An operation's stated precondition does not hold."""


class ConclusionError(FormError):
    """A mechanically asserted conclusion failed (implementation defect)."""


class VacuumIntegralityError(FormError):
    """The degree-0 lattice is r Z vac with a non-integer r.

    Such a family cannot be product-closed: the vacuum self-product forces
    r^2 vac into the form, and r^2 is not an integer multiple of r.
    """


class RankMismatchError(FormError):
    """Degreewise ranks differ, so the comparison is meaningless."""


class TruncatedForm:
    """Degree-indexed lattice family inside a truncated VOA."""

    def __init__(self, host: TruncatedVOA, lattices: dict,
                 generators: Sequence[GradedVector] = (),
                 gen_degree: int | None = None,
                 saturation_trace: list | None = None) -> None:
        self.host = host
        self.lattices = {int(d): lat for d, lat in lattices.items()
                         if lat.rank > 0}
        self.generators = tuple(generators)
        self.gen_degree = gen_degree
        self.saturation_trace = saturation_trace or []
        self._gram_cache = {}

    def lattice(self, degree: int) -> ZLattice:
        lat = self.lattices.get(degree)
        if lat is None:
            return ZLattice.zero(self.host.dim(degree))
        return lat

    def rank(self, degree: int) -> int:
        return self.lattice(degree).rank

    def degrees(self) -> list:
        return sorted(self.lattices)

    def basis_vectors(self, degree: int) -> list:
        return [self.host.vector_from_coords(degree, row)
                for row in self.lattice(degree).basis_rows()]

    def contains(self, v: GradedVector) -> bool:
        for d, comp in self.host.homogeneous_components(v).items():
            _, row = self.host.coords(comp)
            if row not in self.lattice(d):
                return False
        return True

    def with_scaled_degree(self, degree: int, c) -> "TruncatedForm":
        """Copy with one degree's lattice scaled (fixture constructor)."""
        lats = dict(self.lattices)
        lats[degree] = self.lattice(degree).scale(c)
        return TruncatedForm(self.host, lats, self.generators,
                             self.gen_degree, self.saturation_trace)

    def __repr__(self):
        ranks = {d: self.rank(d) for d in self.degrees()}
        return f"TruncatedForm(cutoff={self.host.cutoff}, ranks={ranks})"


# ---------------------------------------------------------------------------
# generation by saturation
# ---------------------------------------------------------------------------

def _products_all_k(V: TruncatedVOA, u: GradedVector, v: GradedVector) -> dict:
    """{k: term dict} for all products u_k v landing below the cutoff."""
    out: dict = {}
    for m1, c1 in u.terms.items():
        for m2, c2 in v.terms.items():
            cc = c1 * c2
            for k, bucket in V.pair_products(m1, m2).items():
                tgt = out.setdefault(k, {})
                for mono, c in bucket.items():
                    tgt[mono] = tgt.get(mono, Fraction(0)) + cc * c
    return {k: b for k, b in ((k, {m: c for m, c in b.items() if c})
                              for k, b in out.items()) if b}


def generate_form(V: TruncatedVOA, generators: Iterable[GradedVector],
                  gen_degree: int | None = None,
                  iter_bound: int = 50) -> TruncatedForm:
    """Close the generators (plus the vacuum) under all truncated products.

    Maintains one canonical lattice per degree plus the growing list of
    found vectors that generate it; each pass multiplies every ordered pair
    of listed vectors not seen before, over every k whose product lands
    below the cutoff.  Stops when a pass adds nothing.  A failure to
    stabilize raises SaturationError carrying the per-pass rank/denominator
    trace (which is also the denominator-growth report for converged runs).
    """
    gens = [g for g in generators if not g.is_zero()]
    for g in gens:
        V.degree_of(g)  # raises NotHomogeneousError for mixed degrees
    max_gen_degree = max((V.degree_of(g) for g in gens), default=0)
    if gen_degree is None:
        gen_degree = max_gen_degree
    elif max_gen_degree > gen_degree:
        raise PreconditionError(
            f"generator of degree {max_gen_degree} exceeds bound {gen_degree}")

    items: list = []           # (degree, vector) in discovery order
    lattices: dict = {}

    def try_add(vec: GradedVector) -> bool:
        if vec.is_zero():
            return False
        d, row = V.coords(vec)
        lat = lattices.get(d)
        if lat is None:
            lat = ZLattice.zero(V.dim(d))
        if row in lat:
            return False
        lattices[d] = lattice_sum(lat, ZLattice.from_rows(V.dim(d), [row]))
        items.append((d, vec))
        return True

    try_add(V.vacuum())
    for g in gens:
        try_add(g)

    trace = []
    prev = 0
    for _ in range(iter_bound):
        cur = len(items)
        added = False
        for i in range(cur):
            du, u = items[i]
            if du == 0:
                continue  # vacuum as left factor only reproduces the input
            for j in range(cur):
                if i < prev and j < prev:
                    continue
                dv, v = items[j]
                for k, terms in _products_all_k(V, u, v).items():
                    if try_add(GradedVector(terms, V.cutoff)):
                        added = True
        trace.append({d: lattices[d].den for d in sorted(lattices)})
        if not added and len(items) == cur:
            return TruncatedForm(V, lattices, [V.vacuum()] + gens,
                                 gen_degree, trace)
        prev = cur
    raise SaturationError(
        f"saturation did not stabilize within {iter_bound} passes", trace)


# ---------------------------------------------------------------------------
# integrality certificates
# ---------------------------------------------------------------------------

class LICertificate:
    """Outcome of a degreewise integrality check, truncation-scoped."""

    def __init__(self, cutoff: int, passed: bool, degrees: dict,
                 first_failure: tuple | None) -> None:
        self.scope = f"degrees<={cutoff}"
        self.passed = passed
        self.degrees = degrees       # d -> {"rank": r, "gram": [[Fraction]]}
        self.first_failure = first_failure  # (degree, i, j, value) or None

    def to_json(self) -> dict:
        out = {"scope": self.scope, "passed": self.passed, "degrees": {}}
        for d, info in sorted(self.degrees.items()):
            out["degrees"][str(d)] = {
                "basis_rank": info["rank"],
                "gram": [[format_rational(x) for x in row]
                         for row in info["gram"]],
                "li": info["li"],
            }
        if self.first_failure is not None:
            d, i, j, val = self.first_failure
            out["witness"] = {"degree": d, "row": i, "col": j,
                              "value": format_rational(val)}
        return out


def form_gram(J: TruncatedForm, degree: int) -> list:
    """Gram matrix of the invariant form on the degree's lattice basis."""
    hit = J._gram_cache.get(degree)
    if hit is not None:
        return hit
    V = J.host
    rows = J.lattice(degree).basis_rows()
    fm = V.form_matrix(degree)
    n = V.dim(degree)
    out = []
    for u in rows:
        fu = [sum((u[i] * fm[i][j] for i in range(n)), Fraction(0))
              for j in range(n)]
        out.append([sum((fu[j] * w[j] for j in range(n)), Fraction(0))
                    for w in rows])
    J._gram_cache[degree] = out
    return out

def check_lattice_integral(J: TruncatedForm) -> LICertificate:
    """PASS with per-degree Gram matrices, or FAIL with the first bad entry."""
    degrees = {}
    failure = None
    passed = True
    for d in range(J.host.cutoff + 1):
        if J.rank(d) == 0:
            continue
        gram = form_gram(J, d)
        li = True
        for i, row in enumerate(gram):
            for j, val in enumerate(row):
                if val.denominator != 1:
                    li = False
                    if failure is None:
                        failure = (d, i, j, val)
                    break
            if not li:
                break
        degrees[d] = {"rank": J.rank(d), "gram": gram, "li": li}
        passed = passed and li
    return LICertificate(J.host.cutoff, passed, degrees, failure)


def minimal_integral_scale(J: TruncatedForm) -> int:
    """Least m > 0 with m*J lattice-integral below the cutoff.

    Scaling a set by m scales Gram entries by m^2, so this is the least m
    with m^2 * entry integral for every stored Gram entry; m never exceeds
    the lcm of the entry denominators.
    """
    den = 1
    for d in range(J.host.cutoff + 1):
        if J.rank(d) == 0:
            continue
        for row in form_gram(J, d):
            for val in row:
                den = lcm(den, val.denominator)
    for m in range(1, den + 1):
        mm = m * m
        ok = True
        for d in range(J.host.cutoff + 1):
            if J.rank(d) == 0:
                continue
            for row in form_gram(J, d):
                for val in row:
                    if (mm * val).denominator != 1:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return m
    raise ConclusionError("no scale up to the denominator lcm worked")


# ---------------------------------------------------------------------------
# dual families
# ---------------------------------------------------------------------------

class DualFamily:
    """Degreewise duals of a form; low-rank degrees are span-relative."""

    def __init__(self, lattices: dict, low_rank_degrees: tuple) -> None:
        self.lattices = lattices
        self.low_rank_degrees = low_rank_degrees

    def lattice(self, degree: int) -> ZLattice:
        return self.lattices[degree]

    def degrees(self):
        return sorted(self.lattices)


def dual_form(J: TruncatedForm) -> DualFamily:
    """Degreewise dual w.r.t. the invariant form restricted to each degree.

    Distinct degrees pair to zero, so the degreewise restriction is the
    whole story.  For degrees where J has lower rank than the graded piece,
    the dual is taken inside the rational span of J's piece and the degree
    is flagged.
    """
    V = J.host
    duals = {}
    low = []
    for d in J.degrees():
        L = J.lattice(d)
        if L.rank < V.dim(d):
            low.append(d)
        fm = QMatrix.from_rows(V.form_matrix(d)) if V.dim(d) else QMatrix(0, 0, [])
        try:
            duals[d] = dual_lattice(L, fm)
        except DegenerateFormError:
            raise DegenerateFormError(
                f"invariant form degenerate on the degree-{d} piece")
    return DualFamily(duals, tuple(low))


def dual_stability_check(J: TruncatedForm, n: int,
                         return_witness: bool = False):
    """Whether (1/n!) L(1)^n maps each degree's dual into the lower dual."""
    if _missing_vacuum(J):
        raise PreconditionError("the vacuum does not lie in the form")
    V = J.host
    duals = dual_form(J)
    fac = 1
    for i in range(1, n + 1):
        fac *= i
    for s in duals.degrees():
        tgt = s - n
        for row in duals.lattice(s).basis_rows():
            u = V.vector_from_coords(s, row)
            cur = u
            for _ in range(n):
                cur = V.L_apply(1, cur)
            cur = cur.scale(Fraction(1, fac))
            if cur.is_zero():
                continue
            _, out_row = V.coords(cur)
            target = duals.lattices.get(tgt)
            ok = target is not None and out_row in target
            if not ok:
                if return_witness:
                    return False, (s, row)
                return False
    if return_witness:
        return True, None
    return True


def _missing_vacuum(J: TruncatedForm) -> bool:
    V = J.host
    _, vac_row = V.coords(V.vacuum())
    return vac_row not in J.lattice(0)


# ---------------------------------------------------------------------------
# closure sampling
# ---------------------------------------------------------------------------

def closure_sample(J: TruncatedForm, samples: int = 200, seed: int = 0):
    """Seeded product sampling: a_k b of basis vectors must stay in the form.

    Returns (ok, witness) where witness is (degree_a, index_a, degree_b,
    index_b, k) for the first failing triple.
    """
    V = J.host
    rng = random.Random(seed)
    degs = [d for d in J.degrees() if J.rank(d) > 0]
    if not degs:
        return True, None
    for _ in range(samples):
        da = rng.choice(degs)
        db = rng.choice(degs)
        ia = rng.randrange(J.rank(da))
        ib = rng.randrange(J.rank(db))
        kmin = da + db - 1 - V.cutoff
        kmax = da + db - 1
        k = rng.randint(kmin, kmax)
        u = V.vector_from_coords(da, J.lattice(da).basis_rows()[ia])
        v = V.vector_from_coords(db, J.lattice(db).basis_rows()[ib])
        prod = V.vertex_product(u, k, v)
        if not J.contains(prod):
            return False, (da, ia, db, ib, k)
    return True, None


# ---------------------------------------------------------------------------
# the two rescaling constructions
# ---------------------------------------------------------------------------

def scaled_with_vacuum(J: TruncatedForm, m: int,
                       assert_conclusion: bool = True,
                       seed: int = 0) -> TruncatedForm:
    """The family m*J + Z vac, for an integer m making m*J integral.

    For a product-closed J this is again product-closed and integral; both
    are asserted (sampling for closure) unless disabled.
    """
    if m <= 0:
        raise PreconditionError("m must be a positive integer")
    V = J.host
    scaled = TruncatedForm(V, {d: J.lattice(d).scale(m)
                               for d in J.degrees()})
    cert = check_lattice_integral(scaled)
    if not cert.passed:
        d, i, j, val = cert.first_failure
        raise PreconditionError(
            f"m*J is not integral at degree {d}: entry ({i},{j}) = {val}")
    lats = {d: scaled.lattice(d) for d in scaled.degrees()}
    _, vac_row = V.coords(V.vacuum())
    lats[0] = lattice_sum(lats.get(0, ZLattice.zero(1)),
                          ZLattice.from_rows(1, [vac_row]))
    out = TruncatedForm(V, lats,
                        [V.vacuum()] + [g.scale(m) for g in J.generators],
                        J.gen_degree)
    if assert_conclusion:
        cert2 = check_lattice_integral(out)
        if not cert2.passed:
            raise ConclusionError(
                "m*J + Z vac failed the integrality check")
        ok, witness = closure_sample(out, seed=seed)
        if not ok:
            raise ConclusionError(
                f"m*J + Z vac failed closure sampling at {witness}")
    return out


def rescale_to_integral(J: TruncatedForm, t: int,
                        iter_bound: int = 50):
    """Exponent pair (m1, m2) and the regenerated integral form.

    m1 is the exponent of the degree-(1..t) pieces over their intersection
    with the degreewise duals; m2 is the symmetric exponent for the duals.
    The form regenerated from Z vac and m1*m2 times the low-degree pieces is
    integral below the cutoff, and that conclusion is asserted.
    """
    V = J.host
    if J.gen_degree is not None and J.gen_degree > t:
        raise PreconditionError(
            f"form was generated in degrees <= {J.gen_degree}, above t={t}")
    if _missing_vacuum(J):
        raise PreconditionError("the vacuum does not lie in the form")
    m1 = 1
    m2 = 1
    for s in range(1, t + 1):
        L = J.lattice(s)
        if L.rank == 0:
            continue
        fm = QMatrix.from_rows(V.form_matrix(s))
        dual = dual_lattice(L, fm)
        inter = lattice_intersect(L, dual)
        if inter.rank != L.rank:
            raise DegenerateFormError(
                f"degree-{s} dual intersection lost rank")
        m1 = lcm(m1, quotient_exponent(L, inter))
        m2 = lcm(m2, quotient_exponent(dual, inter))
    m = m1 * m2
    gens = [V.vacuum()]
    for s in range(1, t + 1):
        for row in J.lattice(s).basis_rows():
            gens.append(V.vector_from_coords(s, [m * x for x in row]))
    out = generate_form(V, gens, gen_degree=t, iter_bound=iter_bound)
    cert = check_lattice_integral(out)
    if not cert.passed:
        d, i, j, val = cert.first_failure
        raise ConclusionError(
            f"rescaled form not integral at degree {d}: {val}")
    return m1, m2, out


# ---------------------------------------------------------------------------
# quasi-primary generation
# ---------------------------------------------------------------------------

class QPCertificate:
    """Quasi-primarity of the generators plus integrality of their closure."""

    def __init__(self, quasi_primary: bool, failures: list,
                 li_certificate: LICertificate | None,
                 form: TruncatedForm | None = None) -> None:
        self.quasi_primary = quasi_primary
        self.non_quasi_primary_indices = failures
        self.li_certificate = li_certificate
        self.form = form

    @property
    def passed(self) -> bool:
        return self.quasi_primary and self.li_certificate is not None \
            and self.li_certificate.passed

    def to_json(self) -> dict:
        out = {"quasi_primary": self.quasi_primary,
               "non_quasi_primary_indices": self.non_quasi_primary_indices,
               "passed": self.passed}
        if self.li_certificate is not None:
            out["integrality"] = self.li_certificate.to_json()
        return out


def quasi_primary_integrality_check(V: TruncatedVOA,
                                    generators: Sequence[GradedVector],
                                    iter_bound: int = 50) -> QPCertificate:
    """Certify that quasi-primary generators close into an integral form.

    A generator failing the raising-operator test is reported separately
    from an integrality failure; the closure is only attempted when all
    generators are quasi-primary, since the closure claim presupposes them.
    """
    failures = [i for i, g in enumerate(generators)
                if not V.is_quasi_primary(g)]
    if failures:
        return QPCertificate(False, failures, None)
    J = generate_form(V, list(generators), iter_bound=iter_bound)
    return QPCertificate(True, [], check_lattice_integral(J), J)


# ---------------------------------------------------------------------------
# vacuum line
# ---------------------------------------------------------------------------

def vacuum_intersection(J: TruncatedForm) -> int:
    """The unique n > 0 with J_0 = n Z vac; errors on fractional r."""
    L = J.lattice(0)
    if L.rank == 0:
        raise PreconditionError("degree-0 piece is zero")
    gen = L.basis_rows()[0][0]
    r = abs(gen)
    if r.denominator != 1:
        raise VacuumIntegralityError(
            f"degree-0 lattice is {r} Z vac; closure would force "
            f"{r * r} vac into the form, which is not an integer multiple "
            f"of {r}")
    return int(r)


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

class VOAAutomorphism:
    """Lift of a signed lattice isometry, with tail sign corrections.

    ``isometry`` maps basis coordinates (as a matrix on column vectors) and
    must preserve the Gram matrix; ``basis_signs`` fixes the lift on the
    ground states of the basis vectors.  The sign on a general tail is the
    unique bimultiplicative-coboundary extension, so the lifted map is an
    algebra map for every choice of basis signs.
    """

    def __init__(self, host: TruncatedVOA, isometry: Sequence[Sequence[int]],
                 basis_signs: Sequence[int] | None = None) -> None:
        V = host
        n = V.lattice.rank
        S = tuple(tuple(int(x) for x in row) for row in isometry)
        if len(S) != n or any(len(r) != n for r in S):
            raise ValueError("isometry has wrong shape")
        g = V.lattice.gram
        for i in range(n):
            for j in range(n):
                gi = [sum(S[a][i] * g[a][b] for a in range(n))
                      for b in range(n)]
                if sum(gi[b] * S[b][j] for b in range(n)) != g[i][j]:
                    raise ValueError("matrix does not preserve the form")
        signs = tuple(int(s) for s in (basis_signs or (1,) * n))
        if len(signs) != n or any(s not in (1, -1) for s in signs):
            raise ValueError("basis signs must be +-1 of length rank")
        self.host = V
        self.isometry = S
        self.basis_signs = signs
        self._mats = {}
        self._delta = self._delta_table()

    def _delta_table(self):
        V = self.host
        n = V.lattice.rank
        S = self.isometry
        out = []
        for i in range(n):
            row = []
            ei = tuple(int(a == i) for a in range(n))
            si = tuple(S[a][i] for a in range(n))
            for j in range(n):
                ej = tuple(int(a == j) for a in range(n))
                sj = tuple(S[a][j] for a in range(n))
                row.append(V.epsilon(ei, ej) * V.epsilon(si, sj))
            out.append(tuple(row))
        return tuple(out)

    def tail_sign(self, alpha: Sequence[int]) -> int:
        """The coboundary sign on e^alpha."""
        n = self.host.lattice.rank
        d = self._delta
        par = 0
        for i in range(n):
            a = alpha[i]
            if self.basis_signs[i] == -1 and a % 2:
                par ^= 1
            if d[i][i] == -1 and (a * (a - 1) // 2) % 2:
                par ^= 1
            for j in range(i + 1, n):
                if d[i][j] == -1 and (a * alpha[j]) % 2:
                    par ^= 1
        return -1 if par else 1

    def apply(self, v: GradedVector) -> GradedVector:
        V = self.host
        S = self.isometry
        n = V.lattice.rank
        out: dict = {}
        for mono, coeff in v.terms.items():
            tail = tuple(sum(S[a][i] * mono.tail[i] for i in range(n))
                         for a in range(n))
            base = coeff * self.tail_sign(mono.tail)
            spread = [((), base)]
            for (m_, i_) in mono.modes:
                nxt = []
                for modes, c in spread:
                    for a in range(n):
                        s = S[a][i_]
                        if s:
                            nxt.append((modes + ((m_, a),), c * s))
                spread = nxt
            for modes, c in spread:
                key = type(mono)(tuple(sorted(modes)), tail)
                out[key] = out.get(key, Fraction(0)) + c
        return GradedVector(out, v.cutoff)

    def matrix(self, degree: int) -> tuple:
        """Induced integer matrix on graded_basis(degree) (column action)."""
        hit = self._mats.get(degree)
        if hit is not None:
            return hit
        V = self.host
        basis = V.graded_basis(degree)
        idx = V.basis_index(degree)
        dim = len(basis)
        cols = []
        for mono in basis:
            img = self.apply(GradedVector({mono: Fraction(1)}, V.cutoff))
            col = [0] * dim
            for m2, c in img.terms.items():
                if c.denominator != 1:  # pragma: no cover - integer by design
                    raise ValueError("automorphism matrix not integral")
                col[idx[m2]] = int(c)
            cols.append(col)
        mat = tuple(tuple(cols[j][i] for j in range(dim))
                    for i in range(dim))
        self._mats[degree] = mat
        return mat

    def compose(self, other: "VOAAutomorphism") -> "VOAAutomorphism":
        """self after other."""
        V = self.host
        n = V.lattice.rank
        S = tuple(tuple(sum(self.isometry[a][b] * other.isometry[b][i]
                            for b in range(n)) for i in range(n))
                  for a in range(n))
        signs = []
        for i in range(n):
            ei = [int(a == i) for a in range(n)]
            oi = [other.isometry[a][i] for a in range(n)]
            signs.append(other.tail_sign(ei) * self.tail_sign(oi))
        return VOAAutomorphism(V, S, signs)

    def key(self):
        return (self.isometry, self.basis_signs)

    def __eq__(self, other):
        return isinstance(other, VOAAutomorphism) and \
            self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def preserves_form(self, J: TruncatedForm) -> bool:
        for d in J.degrees():
            lat = J.lattice(d)
            mat = self.matrix(d)
            for row in lat.basis_rows():
                if apply_matrix(mat, row) not in lat:
                    return False
        return True


def negation_lift(V: TruncatedVOA) -> VOAAutomorphism:
    """The lift of the -1 isometry with trivial basis signs."""
    n = V.lattice.rank
    return VOAAutomorphism(V, [[-int(i == j) for j in range(n)]
                               for i in range(n)])


def parity_sign_map(V: TruncatedVOA, index: int) -> VOAAutomorphism:
    """Identity isometry, sign -1 on ground states odd in one coordinate."""
    n = V.lattice.rank
    signs = [1] * n
    signs[index] = -1
    return VOAAutomorphism(V, [[int(i == j) for j in range(n)]
                               for i in range(n)], signs)


# ---------------------------------------------------------------------------
# fixed points, eigenforms, invariant intersections
# ---------------------------------------------------------------------------

def fixed_subform(J: TruncatedForm,
                  auts: Sequence[VOAAutomorphism]) -> TruncatedForm:
    """Degreewise common fixed lattice of the listed automorphisms."""
    for a in auts:
        if not a.preserves_form(J):
            raise PreconditionError(
                "an automorphism does not map the form into itself; "
                "intersect over the group first")
    V = J.host
    lats = {}
    for d in J.degrees():
        L = J.lattice(d)
        h = [list(r) for r in L.rows]
        if not h:
            continue
        n = V.dim(d)
        blocks = []
        for a in auts:
            mat = a.matrix(d)
            block = []
            for row in h:
                img = apply_matrix(mat, row)
                block.append([img[c] - row[c] for c in range(n)])
            blocks.append(block)
        if not blocks:
            lats[d] = L
            continue
        stacked = [sum((blocks[b][i] for b in range(len(blocks))), [])
                   for i in range(len(h))]
        ker = kernel_int(stacked, len(stacked[0]) if stacked else 0)
        rows = []
        for y in ker:
            rows.append([Fraction(sum(y[i] * h[i][c] for i in range(len(h))),
                                  L.den) for c in range(n)])
        lat = ZLattice.from_rows(n, rows)
        if lat.rank:
            lats[d] = lat
    return TruncatedForm(V, lats)


def graded_sign_action(V: TruncatedVOA, auts: Sequence[VOAAutomorphism],
                       degree: int) -> SignedAction:
    """SignedAction of the automorphisms' matrices on one graded piece."""
    return SignedAction(V.dim(degree), [a.matrix(degree) for a in auts])


def character_eigenform(J: TruncatedForm, auts: Sequence[VOAAutomorphism],
                        char: Character) -> dict:
    """Degreewise eigenlattices of the form under commuting involutions."""
    from voaforms.latgroup import eigenlattice
    for a in auts:
        if not a.preserves_form(J):
            raise PreconditionError(
                "an automorphism does not map the form into itself")
    V = J.host
    out = {}
    for d in J.degrees():
        act = graded_sign_action(V, auts, d)
        out[d] = eigenlattice(J.lattice(d), act, char)
    return out


def tel_exponents(J: TruncatedForm,
                  auts: Sequence[VOAAutomorphism]) -> dict:
    """Exponent of each degree piece over its total eigenlattice.

    Every value must divide 2^r for r listed involutions; violations raise.
    """
    from voaforms.latgroup import total_eigenlattice
    V = J.host
    r = len(auts)
    out = {}
    for d in J.degrees():
        act = graded_sign_action(V, auts, d)
        tel = total_eigenlattice(J.lattice(d), act)
        e = quotient_exponent(J.lattice(d), tel)
        if (1 << r) % e:
            raise ConclusionError(
                f"degree {d}: exponent {e} does not divide 2^{r}")
        out[d] = e
    return out


def invariant_form_intersect(J: TruncatedForm,
                             auts: Sequence[VOAAutomorphism],
                             bound: int = 1024):
    """Intersection of g.J over the generated finite group, with exponents.

    Returns (form, {degree: exponent of J over the intersection}).
    """
    # close the group abstractly on (isometry, basis signs)
    group = {a.key(): a for a in auts}
    ident = VOAAutomorphism(J.host,
                            [[int(i == j) for j in range(J.host.lattice.rank)]
                             for i in range(J.host.lattice.rank)])
    group[ident.key()] = ident
    frontier = list(group.values())
    while frontier:
        nxt = []
        for g in frontier:
            for a in auts:
                h = g.compose(a)
                if h.key() not in group:
                    group[h.key()] = h
                    nxt.append(h)
                    if len(group) > bound:
                        raise FormError(
                            f"automorphism group exceeds {bound} elements")
        frontier = nxt
    lats = {}
    exps = {}
    for d in J.degrees():
        L = J.lattice(d)
        inter = L
        for g in group.values():
            inter = lattice_intersect(inter, image_lattice(g.matrix(d), L))
        if inter.rank:
            lats[d] = inter
        exps[d] = quotient_exponent(L, inter)
    out = TruncatedForm(J.host, lats)
    for a in auts:
        if not a.preserves_form(out):  # pragma: no cover - structural
            raise ConclusionError("intersection is not invariant")
    return out, exps


# ---------------------------------------------------------------------------
# mutual scale transfer
# ---------------------------------------------------------------------------

def mutual_scale_report(J: TruncatedForm, K: TruncatedForm):
    """Least scales pushing each form into the other, degree by degree.

    Returns (m_J_into_K, m_K_into_J, per_degree) where per_degree maps each
    compared degree to its pair of exponents.  These witness that the two
    forms are commensurable below the cutoff, so one is nearly integral iff
    the other is.
    """
    if J.host is not K.host:
        raise PreconditionError("forms live in different hosts")
    per = {}
    mjk = 1
    mkj = 1
    for d in sorted(set(J.degrees()) | set(K.degrees())):
        LJ, LK = J.lattice(d), K.lattice(d)
        if LJ.rank != LK.rank:
            raise RankMismatchError(
                f"degree {d}: ranks {LJ.rank} vs {LK.rank}")
        if LJ.rank == 0:
            continue
        s = lattice_sum(LJ, LK)
        if s.rank != LJ.rank:
            raise RankMismatchError(
                f"degree {d}: rational spans differ")
        a = quotient_exponent(s, LK)
        b = quotient_exponent(s, LJ)
        per[d] = (a, b)
        mjk = lcm(mjk, a)
        mkj = lcm(mkj, b)
    return mjk, mkj, per


# ---------------------------------------------------------------------------
# degree-piece algebra extraction (trace-form comparisons)
# ---------------------------------------------------------------------------

def degree_mode_matrices(J: TruncatedForm, degree: int) -> list:
    """Matrices of x_{degree-1} acting on the degree piece, per basis vector.

    The product of two degree-i elements at mode i-1 lands in degree i
    again, so each basis vector acts on the piece; on a product-closed form
    the matrices are integral.  Column convention: entry (k, j) is the
    k-th coordinate of x_{degree-1} (basis_j).
    """
    V = J.host
    basis = J.basis_vectors(degree)
    lat = J.lattice(degree)
    dim = len(basis)
    mats = []
    for x in basis:
        cols = []
        for y in basis:
            prod = V.vertex_product(x, degree - 1, y)
            if prod.is_zero():
                cols.append([Fraction(0)] * dim)
                continue
            _, coords = V.coords(prod)
            rel = lat.coordinates(coords)
            if rel is not None:
                cols.append([Fraction(c) for c in rel])
            else:
                cols.append(_rational_coords(lat, coords))
        mats.append(QMatrix(dim, dim, [cols[j][k] for k in range(dim)
                                       for j in range(dim)]))
    return mats


def degree_trace_form(J: TruncatedForm, degree: int) -> QMatrix:
    """Gram matrix of (x, y) -> Tr(x_{degree-1} y_{degree-1}) on the piece.

    This is the integer-valued trace form on the degree piece; compare it
    against the inherited form (``form_gram``) with proportionality_check.
    Symmetric by trace cyclicity even where the mode product itself is not
    commutative.
    """
    mats = degree_mode_matrices(J, degree)
    dim = len(mats)
    entries = []
    for i in range(dim):
        for j in range(dim):
            entries.append((mats[i] @ mats[j]).trace())
    return QMatrix(dim, dim, entries)


def degree_algebra(J: TruncatedForm, degree: int):
    """The degree piece as a FiniteAlgebra, when its mode product commutes.

    Pieces of hosts with a nonzero degree-1 space generally fail
    commutativity (the product differs from its flip by a translate of a
    lower product); those feed degree_trace_form directly instead.
    """
    from voaforms.dihedral import FiniteAlgebra
    mats = degree_mode_matrices(J, degree)
    dim = len(mats)
    cijk = [[[mats[i].entry(k, j) for k in range(dim)]
             for j in range(dim)] for i in range(dim)]
    gram = form_gram(J, degree)
    labels = [f"x{i}" for i in range(dim)]
    return FiniteAlgebra(labels, cijk, gram)


def standard_form(V: TruncatedVOA, iter_bound: int = 50) -> TruncatedForm:
    """The form generated by the ground states of the +-basis vectors."""
    gens = []
    for i in range(V.lattice.rank):
        tail = [0] * V.lattice.rank
        tail[i] = 1
        gens.append(V.monomial_vector([], tail))
        tail2 = [0] * V.lattice.rank
        tail2[i] = -1
        gens.append(V.monomial_vector([], tail2))
    return generate_form(V, gens, iter_bound=iter_bound)


def build_manifest(J: TruncatedForm,
                   cert: LICertificate | None = None) -> dict:
    """Manifest JSON for a form: host lattice, cutoff, generators, degrees."""
    V = J.host
    if cert is None:
        cert = check_lattice_integral(J)
    out = {
        "lattice": V.lattice.to_json(),
        "cutoff": V.cutoff,
        "generators": [V.format_element(g) for g in J.generators],
        "degrees": {},
    }
    if J.gen_degree is not None:
        out["gen_degree"] = J.gen_degree
    for d in range(V.cutoff + 1):
        info = cert.degrees.get(d)
        if info is None:
            continue
        out["degrees"][str(d)] = {
            "basis_rank": info["rank"],
            "gram": [[format_rational(x) for x in row]
                     for row in info["gram"]],
            "li": info["li"],
        }
    if J.saturation_trace:
        out["denominator_trace"] = [
            {str(d): den for d, den in sorted(pass_info.items())}
            for pass_info in J.saturation_trace]
    return out


def form_from_manifest(data: dict, iter_bound: int = 50):
    """Rebuild (host, form) from a manifest's lattice/cutoff/generators."""
    from voaforms.voa import EvenLattice
    lattice = EvenLattice.from_json(data["lattice"])
    V = TruncatedVOA(lattice, int(data["cutoff"]))
    gens = [V.parse_element(s) for s in data["generators"]]
    gen_degree = data.get("gen_degree")
    J = generate_form(V, gens,
                      gen_degree=None if gen_degree is None
                      else int(gen_degree),
                      iter_bound=iter_bound)
    return V, J


def _rational_coords(lat: ZLattice, vector):
    mat = QMatrix.from_rows(lat.basis_rows())
    vq = [Fraction(x) for x in vector]
    # solve y * basis = vector by elimination on the transpose
    n = mat.cols
    r = mat.rows
    aug = [[mat.entry(i, j) for i in range(r)] + [vq[j]] for j in range(n)]
    sol = [Fraction(0)] * r
    rr = 0
    piv = {}
    for c in range(r):
        p = next((i for i in range(rr, n) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[rr], aug[p] = aug[p], aug[rr]
        dvd = aug[rr][c]
        aug[rr] = [x / dvd for x in aug[rr]]
        for i in range(n):
            if i != rr and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[rr])]
        piv[c] = rr
        rr += 1
    for i in range(rr, n):
        if aug[i][r]:
            raise FormError("product left the rational span of the piece")
    for c, i in piv.items():
        sol[c] = aug[i][r]
    return sol
