"""Finite models of spectral spaces for gluing and Tate-support computations."""

from .arith import excisive_tate_layers, lex_divides_all_powers, LexValue
from .errors import (
    AgreementFailure,
    BoundExceeded,
    GroupError,
    InvalidDatum,
    NotSpecializationClosedError,
    NotThomasonError,
    PreconditionError,
    TTGlueError,
    UnknownPointError,
)
from .gluing import (
    GluedSpace,
    GluingDatum,
    SpectralMapModel,
    bounds_report,
    check_closed_determined,
    check_glue_round_trip,
    check_homeo_over_y,
    check_local_preservation,
    check_pushout,
    check_recover_specializations,
    check_tiv,
    check_tiv_strong,
    glue_spaces,
    restriction_datum,
    split_diagnostic,
    tate_support_of_map,
)
from .groups import FiniteGroupModel, build_group, equivariant_tate_classes, subgroup_classes
from .reports import CheckReport, report_document
from .space import SpectralSpaceModel, SubsetClassification, Violation, validate_space

__version__ = "0.1.0"
