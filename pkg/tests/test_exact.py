import random
from fractions import Fraction

import pytest

from voaforms.exact import (
    DegenerateFormError,
    DimensionMismatchError,
    NotSublatticeError,
    QMatrix,
    SpanMismatchError,
    ZLattice,
    dual_lattice,
    hnf,
    lattice_intersect,
    lattice_sum,
    membership,
    quotient_exponent,
    quotient_index,
    quotient_invariants,
    smith_invariants,
)

from oracles import (
    exponent_by_scan,
    grid_points,
    member_by_solve,
    member_of_span,
    naive_z_span_basis,
)


def lat(*rows):
    return ZLattice.from_rows(len(rows[0]), rows)


class TestHnf:
    def test_identity_is_fixed(self):
        m = QMatrix.identity(3)
        assert hnf(m) == m

    def test_index_two_sublattice(self):
        m = QMatrix.from_rows([[2, 0], [0, 2], [1, 1]])
        out = hnf(m)
        assert out.row_list() == [[1, 1], [0, 2]]

    def test_rational_single_row(self):
        m = QMatrix.from_rows([[Fraction(1, 2), Fraction(1, 3)]])
        out = hnf(m)
        assert out.row_list() == [[Fraction(1, 2), Fraction(1, 3)]]

    def test_row_permutation_independent(self):
        rows = [[2, 3, 1], [4, 0, -2], [1, 1, 1], [0, 5, 5]]
        rng = random.Random(7)
        reference = hnf(QMatrix.from_rows(rows))
        for _ in range(10):
            shuffled = rows[:]
            rng.shuffle(shuffled)
            assert hnf(QMatrix.from_rows(shuffled)) == reference

    def test_canonicalization_idempotent(self):
        a = lat([Fraction(1, 2), Fraction(3, 4)], [5, 7])
        again = ZLattice.from_rows(2, a.basis_rows())
        assert again == a
        assert again.rows == a.rows and again.den == a.den


class TestSumIntersect:
    def test_sum_idempotent(self):
        a = lat([2, 1], [0, 3])
        assert lattice_sum(a, a) == a

    def test_sum_of_three_lines(self):
        a = lat([2, 0])
        b = lat([0, 2])
        c = lat([1, 1])
        s = lattice_sum(lattice_sum(a, b), c)
        assert s == lat([1, 1], [0, 2])

    def test_sum_full(self):
        assert lattice_sum(lat([1, 0]), lat([0, 1])) == ZLattice.standard(2)

    def test_intersect_idempotent(self):
        a = lat([2, 1], [0, 3])
        assert lattice_intersect(a, a) == a

    def test_intersect_skew_scalings(self):
        a = lat([2, 0], [0, 1])
        b = lat([1, 0], [0, 3])
        assert lattice_intersect(a, b) == lat([2, 0], [0, 3])

    def test_intersect_containment(self):
        z2 = ZLattice.standard(2)
        two = z2.scale(2)
        assert lattice_intersect(z2, two) == two

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            lattice_sum(lat([1, 0]), lat([1, 0, 0]))


class TestQuotient:
    def test_equal_lattices(self):
        a = lat([3, 1], [0, 2])
        assert quotient_exponent(a, a) == 1

    def test_diagonal(self):
        a = ZLattice.standard(2)
        b = lat([2, 0], [0, 6])
        assert quotient_invariants(a, b) == [2, 6]
        assert quotient_exponent(a, b) == 6
        assert quotient_index(a, b) == 12

    def test_checkerboard(self):
        a = ZLattice.standard(2)
        b = lat([1, 1], [1, -1])
        assert quotient_exponent(a, b) == 2
        assert quotient_index(a, b) == 2

    def test_scaling_gives_m(self):
        rng = random.Random(3)
        for _ in range(15):
            n = rng.randint(1, 3)
            rows = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)]
            a = ZLattice.from_rows(n, rows)
            if a.rank < n:
                continue
            m = rng.randint(1, 9)
            assert quotient_exponent(a, a.scale(m)) == m

    def test_not_sublattice(self):
        with pytest.raises(NotSublatticeError):
            quotient_exponent(lat([2, 0], [0, 2]), lat([1, 0], [0, 1]))

    def test_span_mismatch(self):
        with pytest.raises(SpanMismatchError):
            quotient_exponent(lat([1, 0], [0, 1]), lat([1, 0]))


class TestDual:
    def test_rank_one(self):
        a = ZLattice.standard(1)
        g = QMatrix.from_rows([[2]])
        assert dual_lattice(a, g) == lat([Fraction(1, 2)])

    def test_unimodular_self_dual(self):
        a = ZLattice.standard(3)
        assert dual_lattice(a, QMatrix.identity(3)) == a

    def test_index_three(self):
        a = ZLattice.standard(2)
        g = QMatrix.from_rows([[2, 1], [1, 2]])
        d = dual_lattice(a, g)
        assert quotient_index(d, a) == 3

    def test_involutive(self):
        rng = random.Random(11)
        g = QMatrix.from_rows([[2, 1], [1, 4]])
        for _ in range(20):
            rows = [[rng.randint(-4, 4) for _ in range(2)] for _ in range(2)]
            a = ZLattice.from_rows(2, rows)
            if a.rank < 2:
                continue
            assert dual_lattice(dual_lattice(a, g), g) == a

    def test_zero_lattice_self_dual(self):
        z = ZLattice.zero(2)
        assert dual_lattice(z, QMatrix.identity(2)) == z

    def test_degenerate_rejected(self):
        a = ZLattice.standard(2)
        g = QMatrix.from_rows([[1, 1], [1, 1]])
        with pytest.raises(DegenerateFormError):
            dual_lattice(a, g)


class TestMembership:
    def test_generator(self):
        a = lat([2, 0], [0, 2], [1, 1])
        assert membership([1, 1], a)

    def test_not_member(self):
        assert not membership([1, 0], ZLattice.standard(2).scale(2))

    def test_multiple_of_generator(self):
        a = lat([1, 1], [1, -1])
        assert membership([3, 3], a)

    def test_rational_vectors(self):
        a = lat([Fraction(1, 2), 0], [0, 1])
        assert membership([Fraction(3, 2), 5], a)
        assert not membership([Fraction(1, 4), 0], a)


class TestSmith:
    def test_known_invariants(self):
        assert smith_invariants([[2, 0], [0, 6]]) == [2, 6]
        assert smith_invariants([[1, 1], [1, -1]]) == [1, 2]
        assert smith_invariants([[0, 0], [0, 0]]) == []

    def test_divisibility_chain(self):
        rng = random.Random(5)
        for _ in range(40):
            m = rng.randint(1, 3)
            n = rng.randint(1, 3)
            mat = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)]
            inv = smith_invariants(mat)
            for d1, d2 in zip(inv, inv[1:]):
                assert d2 % d1 == 0


def random_lattice(rng, dim, max_entry=4, allow_halves=False):
    nrows = rng.randint(1, dim)
    rows = []
    for _ in range(nrows):
        row = [rng.randint(-max_entry, max_entry) for _ in range(dim)]
        if allow_halves and rng.random() < 0.3:
            row = [Fraction(x, 2) for x in row]
        rows.append(row)
    return ZLattice.from_rows(dim, rows), rows


class TestOracleAgreement:
    """Brute-force cross-checks on small random lattices (seeded)."""

    def test_canonical_basis_spans_same_points(self):
        rng = random.Random(2024)
        for _ in range(40):
            dim = rng.randint(1, 3)
            a, gens = random_lattice(rng, dim, max_entry=3)
            grid = grid_points(dim, 3)
            truth = {p for p in grid if member_of_span(p, gens)}
            got = {p for p in grid if member_by_solve(p, a.basis_rows())} \
                if a.rank else {tuple([Fraction(0)] * dim)} & set(grid)
            if a.rank == 0:
                got = {p for p in grid if not any(p)}
            assert got == truth

    def test_sum_intersect_exponent_match_brute_force(self):
        rng = random.Random(99)
        cases = 0
        while cases < 60:
            dim = rng.randint(1, 3)
            a, agens = random_lattice(rng, dim, max_entry=3)
            b, bgens = random_lattice(rng, dim, max_entry=3)
            if a.rank == 0 or b.rank == 0:
                continue
            cases += 1
            grid = grid_points(dim, 3)
            s = lattice_sum(a, b)
            sum_basis = naive_z_span_basis(agens + bgens)
            for p in grid:
                assert member_by_solve(p, s.basis_rows()) == \
                    member_by_solve(p, sum_basis)
            inter = lattice_intersect(a, b)
            for p in grid:
                truth = (member_by_solve(p, a.basis_rows())
                         and member_by_solve(p, b.basis_rows()))
                got = (member_by_solve(p, inter.basis_rows())
                       if inter.rank else not any(p))
                assert got == truth
            # exponent oracle where the quotient is finite
            if inter.rank == a.rank:
                e = quotient_exponent(a, inter)
                assert e == exponent_by_scan(a.basis_rows(),
                                             inter.basis_rows())

    def test_membership_matches_solver(self):
        rng = random.Random(17)
        for _ in range(80):
            dim = rng.randint(1, 3)
            a, _ = random_lattice(rng, dim, max_entry=4, allow_halves=True)
            if a.rank == 0:
                continue
            v = [Fraction(rng.randint(-8, 8), rng.choice([1, 1, 2]))
                 for _ in range(dim)]
            assert membership(v, a) == member_by_solve(v, a.basis_rows())


class TestZeroLattice:
    def test_legal_everywhere(self):
        z = ZLattice.zero(2)
        a = lat([1, 1])
        assert lattice_sum(z, a) == a
        assert lattice_intersect(z, a) == z
        assert quotient_exponent(z, z) == 1
        assert not membership([1, 0], z)
        assert membership([0, 0], z)
        assert dual_lattice(z, QMatrix.identity(2)) == z


class TestQMatrix:
    def test_shape_invariant(self):
        with pytest.raises(ValueError):
            QMatrix(2, 2, [1, 2, 3])

    def test_inverse(self):
        m = QMatrix.from_rows([[2, 1], [1, 2]])
        inv = m.inverse()
        assert m @ inv == QMatrix.identity(2)

    def test_json_round_trip(self):
        m = QMatrix.from_rows([[Fraction(1, 2), 3], [-2, Fraction(7, 5)]])
        assert QMatrix.from_json(m.to_json()) == m
        enc = m.to_json()
        assert enc["entries"][0] == "1/2"
