"""Exact freeness computations for multi-arrangements of hyperplanes."""

from __future__ import annotations

__version__ = "0.1.0"

from .linalg import GF, QQ, Field, parse_field
from .arrangement import (MultiArrangement, characteristic_polynomial, essentialize,
                          graphic_arrangement, intersection_lattice, irreducible_factors,
                          restriction, ziegler_restriction)
from .complexes import build_J_complex, build_S_complex, formality_profile, is_totally_formal
from .homology import freeness_by_homology, homology_table
from .derivations import (Derivation, derivation_space, free_basis_search,
                          minimal_generator_degrees, rank2_exponents, saito_check)
from .tf2 import is_TF2, tf2_freeness_combinatorial
from .analyzer import FreenessVerdict, decide_freeness, validate_certificate, yoshinaga_check
from .textformat import parse_arrangement, parse_arrangement_text, parse_product, serialize

__all__ = [
    "GF", "QQ", "Field", "parse_field",
    "MultiArrangement", "characteristic_polynomial", "essentialize", "graphic_arrangement",
    "intersection_lattice", "irreducible_factors", "restriction", "ziegler_restriction",
    "build_J_complex", "build_S_complex", "formality_profile", "is_totally_formal",
    "freeness_by_homology", "homology_table",
    "Derivation", "derivation_space", "free_basis_search", "minimal_generator_degrees",
    "rank2_exponents", "saito_check",
    "is_TF2", "tf2_freeness_combinatorial",
    "FreenessVerdict", "decide_freeness", "validate_certificate", "yoshinaga_check",
    "parse_arrangement", "parse_arrangement_text", "parse_product", "serialize",
]
