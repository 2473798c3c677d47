"""voaforms: exact truncated lattice VOAs, integral forms, and their checks."""

from voaforms.exact import (
    QMatrix,
    ZLattice,
    hnf,
    lattice_sum,
    lattice_intersect,
    quotient_exponent,
    quotient_invariants,
    quotient_index,
    dual_lattice,
    membership,
)
from voaforms.voa import EvenLattice, FockMonomial, GradedVector, TruncatedVOA
from voaforms.latgroup import (
    SignedAction,
    Character,
    eigenlattice,
    total_eigenlattice,
    tel_exponent_check,
    idempotent_project,
    invariant_intersection,
)
from voaforms.forms import (
    TruncatedForm,
    VOAAutomorphism,
    generate_form,
    standard_form,
    check_lattice_integral,
    minimal_integral_scale,
    dual_form,
    dual_stability_check,
    scaled_with_vacuum,
    rescale_to_integral,
    quasi_primary_integrality_check,
    vacuum_intersection,
    fixed_subform,
    character_eigenform,
    tel_exponents,
    invariant_form_intersect,
    mutual_scale_report,
    degree_algebra,
)
from voaforms.dihedral import (
    FiniteAlgebra,
    dihedral_2a,
    dihedral_2a_report,
    ad_matrix,
    killing_form,
    is_associative_form,
    proportionality_check,
)

__all__ = [
    "QMatrix", "ZLattice", "hnf", "lattice_sum", "lattice_intersect",
    "quotient_exponent", "quotient_invariants", "quotient_index",
    "dual_lattice", "membership",
    "EvenLattice", "FockMonomial", "GradedVector", "TruncatedVOA",
    "SignedAction", "Character", "eigenlattice", "total_eigenlattice",
    "tel_exponent_check", "idempotent_project", "invariant_intersection",
    "TruncatedForm", "VOAAutomorphism", "generate_form", "standard_form",
    "check_lattice_integral", "minimal_integral_scale", "dual_form",
    "dual_stability_check", "scaled_with_vacuum", "rescale_to_integral",
    "quasi_primary_integrality_check", "vacuum_intersection",
    "fixed_subform", "character_eigenform", "tel_exponents",
    "invariant_form_intersect", "mutual_scale_report", "degree_algebra",
    "FiniteAlgebra", "dihedral_2a", "dihedral_2a_report", "ad_matrix",
    "killing_form", "is_associative_form", "proportionality_check",
]
