"""Exact engine for pseudoconvexity invariants of real hypersurfaces in R^(2n)."""

__version__ = "0.1.0"

from .errors import (
    CapError,
    ClosedFormMismatch,
    GeometryError,
    LevitypeError,
    ParseError,
    TheoremViolation,
)
from .jets import TruncatedSeries
from .rational import Q, QC
from .geometry import (
    ACStructure,
    FieldJet,
    Hypersurface,
    VectorField,
    complex_tangent_basis,
    covariant_derivative,
    field_jet,
    is_complex_tangent,
    lie_bracket,
    perturbed_structure,
    project_to_complex_tangent,
    recenter,
)
from .disks import (
    ContactOrder,
    DiskJet,
    DiskTrace,
    compose_phi_u,
    contact_order,
    propagate_cr_jet,
    reparametrize_disk_jet,
)
from .levi import (
    classify_point,
    hermitian_levi_matrix,
    higher_levi,
    higher_levi_closed_form,
    levi_form_bracket,
    levi_form_hessian,
    levi_polar,
)
from .engine import (
    CommutationReport,
    TypeReport,
    ValidationRecord,
    commutation_defect,
    cross_validate,
    disk_from_commuting_field,
    jet_extension_test,
    realize_field_from_disk,
    scan_type,
    type_search,
)
from .parser import parse_expression, series_to_expression
from .cli import ProblemSpec, run_command

__all__ = [
    "__version__",
    "CapError",
    "ClosedFormMismatch",
    "GeometryError",
    "LevitypeError",
    "ParseError",
    "TheoremViolation",
    "TruncatedSeries",
    "Q",
    "QC",
    "ACStructure",
    "FieldJet",
    "Hypersurface",
    "VectorField",
    "complex_tangent_basis",
    "covariant_derivative",
    "field_jet",
    "is_complex_tangent",
    "lie_bracket",
    "perturbed_structure",
    "project_to_complex_tangent",
    "recenter",
    "ContactOrder",
    "DiskJet",
    "DiskTrace",
    "compose_phi_u",
    "contact_order",
    "propagate_cr_jet",
    "reparametrize_disk_jet",
    "classify_point",
    "hermitian_levi_matrix",
    "higher_levi",
    "higher_levi_closed_form",
    "levi_form_bracket",
    "levi_form_hessian",
    "levi_polar",
    "CommutationReport",
    "TypeReport",
    "ValidationRecord",
    "commutation_defect",
    "cross_validate",
    "disk_from_commuting_field",
    "jet_extension_test",
    "realize_field_from_disk",
    "scan_type",
    "type_search",
    "parse_expression",
    "series_to_expression",
    "ProblemSpec",
    "run_command",
]
