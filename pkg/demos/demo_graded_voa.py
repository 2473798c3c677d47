"""Building a truncated lattice VOA and multiplying things in it.

The rank-1 even lattice with Gram (2) gives the smallest interesting host:
its degree-1 space is spanned by one Heisenberg mode and the two ground
states e^{+-gamma}.
"""

from fractions import Fraction

from voaforms import EvenLattice, TruncatedVOA

V = TruncatedVOA(EvenLattice([[2]]), 6)

print("graded dimensions up to the cutoff:",
      [V.dim(d) for d in range(7)])
print("degree-2 basis:",
      [V.format_element(V.monomial_vector(m.modes, m.tail))
       for m in V.graded_basis(2)])

vac = V.vacuum()
eg = V.parse_element("1 * e(1)")
emg = V.parse_element("1 * e(-1)")
h = V.parse_element("1 * h(1,-1) * e(0)")

print()
print("== vertex products ==")
for k in (1, 0, -1, -2):
    prod = V.vertex_product(eg, k, emg)
    print(f"(e^g)_{k} e^-g =", V.format_element(prod))

print()
print("== the invariant form ==")
print("<vac, vac> =", V.bilinear_form(vac, vac))
print("<h, h>     =", V.bilinear_form(h, h),
      " (the invariance identity forces the sign)")
print("<e^g, e^-g> =", V.bilinear_form(eg, emg))

print()
print("== Virasoro operators ==")
om = V.virasoro_element()
print("quadratic element:", V.format_element(om))
print("L(0) reads the degree:",
      V.format_element(V.L_apply(0, V.parse_element("1 * h(1,-2) * e(0)"))))
print("L(1) e^g = 0 (quasi-primary):", V.L_apply(1, eg).is_zero())
print("L(1) h(1,-2):", V.format_element(
    V.L_apply(1, V.parse_element("1 * h(1,-2) * e(0)"))))
print("divided translate of h:", V.format_element(V.divided_translate(h, 2)),
      "= L(-1)^2 h / 2!")

print()
print("== the adjoint identity, coefficient by coefficient ==")
print("holds on (e^g, e^-g, h):",
      V.invariance_identity_check(eg, emg, h))
print("holds on a denser triple:",
      V.invariance_identity_check(om, h.scale(Fraction(1, 3)), h))
