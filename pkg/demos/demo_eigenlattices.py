"""Sign actions on lattices and on integral forms.

First the pure lattice level: a coordinate swap on Z^2, its eigenlattices,
idempotent projections, and the exponent bound for the total eigenlattice.
Then the same machinery degreewise on an integral form, under the lift of
negation and a ground-state parity sign.
"""

from voaforms import (
    Character,
    EvenLattice,
    SignedAction,
    TruncatedVOA,
    ZLattice,
    eigenlattice,
    idempotent_project,
    invariant_intersection,
    tel_exponent_check,
    total_eigenlattice,
)
import voaforms.forms as fm

print("== swap action on Z^2 ==")
swap = SignedAction(2, [[[0, 1], [1, 0]]])
z2 = ZLattice.standard(2)
plus = eigenlattice(z2, swap, Character((1,)))
minus = eigenlattice(z2, swap, Character((-1,)))
print("fixed line:", plus.basis.row_list())
print("anti line:", minus.basis.row_list())
tel = total_eigenlattice(z2, swap)
ok, e = tel_exponent_check(z2, swap)
print("total eigenlattice:", tel.basis.row_list(), "exponent:", e)
print("idempotent projections of (1,0):",
      idempotent_project([1, 0], swap, Character((1,))),
      idempotent_project([1, 0], swap, Character((-1,))))

print()
print("== intersecting over a matrix group ==")
l = ZLattice.from_rows(2, [[1, 0], [0, 2]])
inter, e = invariant_intersection(l, [[[0, 1], [1, 0]]])
print("L =", l.basis.row_list(), "-> common refinement:",
      inter.basis.row_list(), "exponent", e)

print()
print("== the same story inside an integral form ==")
V = TruncatedVOA(EvenLattice([[2]]), 4)
J = fm.standard_form(V)
theta = fm.negation_lift(V)          # gamma -> -gamma, e^a -> e^-a
tau = fm.parity_sign_map(V, 0)       # e^a -> (-1)^a e^a

fixed = fm.fixed_subform(J, [theta])
print("fixed ranks under negation:",
      {d: fixed.rank(d) for d in fixed.degrees()})
for ch in Character.all_characters(2):
    fam = fm.character_eigenform(J, [theta, tau], ch)
    name = "".join("+" if s == 1 else "-" for s in ch.signs)
    print(f"character {name}: ranks", {d: fam[d].rank for d in sorted(fam)})
exps = fm.tel_exponents(J, [theta, tau])
print("exponents over the total eigenlattice:", exps,
      "(all divide 2^2)")
