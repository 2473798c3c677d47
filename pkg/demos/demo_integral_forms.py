"""Integral forms: generation, integrality certificates, duals, rescaling.

Generates the standard form of the rank-1 host from the two ground states,
certifies lattice integrality degree by degree, then walks the two repair
constructions on a deliberately broken variant.
"""

from fractions import Fraction

from voaforms import EvenLattice, TruncatedVOA
import voaforms.forms as fm

V = TruncatedVOA(EvenLattice([[2]]), 4)
J = fm.standard_form(V)

print("per-degree ranks:", {d: J.rank(d) for d in J.degrees()},
      "(equal to the graded dimensions: the form is full)")
print("denominator lcm per pass of the saturation:")
for i, p in enumerate(J.saturation_trace, 1):
    print(f"  pass {i}: {p}")

cert = fm.check_lattice_integral(J)
print("integrality certificate:", "PASS" if cert.passed else "FAIL",
      f"({cert.scope})")
print("degree-1 Gram:", [[str(x) for x in row]
                         for row in fm.form_gram(J, 1)])

duals = fm.dual_form(J)
print("dual ranks:", {d: duals.lattice(d).rank for d in duals.degrees()})
print("raising operators map duals into duals:",
      all(fm.dual_stability_check(J, n) for n in (1, 2, 3)))

print()
print("== a broken variant and its repair ==")
bad = J.with_scaled_degree(1, Fraction(1, 2))
bad_cert = fm.check_lattice_integral(bad)
d, i, jj, val = bad_cert.first_failure
print(f"halving degree 1 breaks integrality: entry ({i},{jj}) at degree {d}"
      f" is {val}")
print("minimal integral scale:", fm.minimal_integral_scale(bad))

m1, m2, repaired = fm.rescale_to_integral(bad, 1)
print(f"rescale: m1 = {m1}, m2 = {m2}; regenerated form is integral:",
      fm.check_lattice_integral(repaired).passed)

k = fm.scaled_with_vacuum(J, 2, seed=1)
print("2J + Z vac is closed and integral:",
      fm.check_lattice_integral(k).passed)

print()
print("== commensurability of two forms ==")
g1 = V.parse_element("1 * e(1)") + V.parse_element("1 * e(-1)")
g2 = V.parse_element("1 * e(1)") + V.parse_element("-1 * e(-1)")
K = fm.generate_form(V, [g1, g2])
mjk, mkj, per = fm.mutual_scale_report(J, K)
print("mutual scales:", mjk, "and", mkj, "per degree:", per)

print()
print("== trace form vs inherited form on a degree piece ==")
from voaforms import proportionality_check
from voaforms.exact import QMatrix

tf = fm.degree_trace_form(J, 2)
inherited = QMatrix.from_rows(fm.form_gram(J, 2))
ratio = proportionality_check(tf, inherited)
print("proportional?", "no" if ratio is None else f"yes, ratio {ratio}")
