"""Tour of the exact lattice toolkit.

Run as: python3 demos/demo_exact_lattices.py  (after `pip install -e .`,
or with PYTHONPATH=src from the repository root)
"""

from fractions import Fraction

from voaforms import (
    QMatrix,
    ZLattice,
    dual_lattice,
    hnf,
    lattice_intersect,
    lattice_sum,
    membership,
    quotient_exponent,
    quotient_invariants,
)

print("== canonical bases ==")
m = QMatrix.from_rows([[2, 0], [0, 2], [1, 1]])
print("rows (2,0),(0,2),(1,1) canonicalize to:", hnf(m).row_list())
print("a rational row keeps its span:",
      hnf(QMatrix.from_rows([[Fraction(1, 2), Fraction(1, 3)]])).row_list())

print()
print("== sums, intersections, quotients ==")
a = ZLattice.from_rows(2, [[2, 0], [0, 1]])
b = ZLattice.from_rows(2, [[1, 0], [0, 3]])
print("A =", a.basis.row_list(), " B =", b.basis.row_list())
print("A + B =", lattice_sum(a, b).basis.row_list())
inter = lattice_intersect(a, b)
print("A cap B =", inter.basis.row_list())
z2 = ZLattice.standard(2)
print("invariants of Z^2 over 2Z x 6Z:",
      quotient_invariants(z2, ZLattice.from_rows(2, [[2, 0], [0, 6]])))
print("exponent of Z^2 over the checkerboard:",
      quotient_exponent(z2, ZLattice.from_rows(2, [[1, 1], [1, -1]])))

print()
print("== membership is exact ==")
c = ZLattice.from_rows(2, [[1, 1], [1, -1]])
print("(3,3) in the checkerboard:", membership([3, 3], c))
print("(1,0) in the checkerboard:", membership([1, 0], c))

print()
print("== dual lattices ==")
gram = QMatrix.from_rows([[2, 1], [1, 2]])
d = dual_lattice(z2, gram)
print("dual of Z^2 under the rank-2 root form:", d.basis.row_list())
print("its index over Z^2 is det =", quotient_exponent(d, z2), "* ...",
      quotient_invariants(d, z2))
print("duality is involutive:", dual_lattice(d, gram) == z2)
