"""Siegel theta series, mod p^m singular expansions and their theta decompositions."""

from .binary import BinaryForm, class_reps, gauss_reduce, level_p_reps, sij_form
from .core_forms import (
    HalfIntegralForm,
    QuadChar,
    UnimodularMatrix,
    automorphism_count,
    chi_eq_prime,
    content,
    gl_equivalent,
    level,
    theta_character,
    weight_congruence_holds,
)
from .kitaoka import CuspMatrix, LatticeBasis, dual_lattice, kitaoka_partner, numeric_theta, verify_kitaoka_deg1
from .qexp import BoundError, FourierExpansion, NotPIntegralError, congruent, reduce_mod
from .singular import (
    detect_singularity,
    freitag_decompose,
    primitive_coeffs,
    primitivize,
    verify_freitag_identity,
    verify_phi_congruence,
)
from .theta import RationalForm, rep_number, square_rep_count, theta_expansion

__version__ = "0.1.0"

__all__ = [
    "automorphism_count",
    "BinaryForm",
    "BoundError",
    "chi_eq_prime",
    "class_reps",
    "congruent",
    "content",
    "CuspMatrix",
    "detect_singularity",
    "dual_lattice",
    "FourierExpansion",
    "freitag_decompose",
    "gauss_reduce",
    "gl_equivalent",
    "HalfIntegralForm",
    "kitaoka_partner",
    "LatticeBasis",
    "level",
    "level_p_reps",
    "NotPIntegralError",
    "numeric_theta",
    "primitive_coeffs",
    "primitivize",
    "QuadChar",
    "RationalForm",
    "reduce_mod",
    "rep_number",
    "sij_form",
    "square_rep_count",
    "theta_character",
    "theta_expansion",
    "UnimodularMatrix",
    "verify_freitag_identity",
    "verify_kitaoka_deg1",
    "verify_phi_congruence",
    "weight_congruence_holds",
]
