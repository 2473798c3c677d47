"""The dihedral 2A algebra, exactly.

Three idempotent-like basis vectors with p.p = p and p.q = (p+q-r)/8 span a
commutative algebra whose natural form is associative but whose trace form
Tr(ad(x)ad(y)) is not, and the two forms are not proportional.  The whole
computation is exact rational arithmetic.
"""

from voaforms.cli import _render_dihedral_text
from voaforms.dihedral import dihedral_2a_report

print(_render_dihedral_text(dihedral_2a_report()))
