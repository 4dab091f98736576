"""Exact cut-and-project point sets and their shape deformations.

Quadratic-field arithmetic, slab enumeration of projection point
sets, acceptance domains of patches, deformation generators with
Meyer and slip diagnostics, and a substitution engine for
eigenvector-driven length deformations.
"""

from .errors import (
    ConfigError,
    DomainError,
    IncompleteKnowledgeError,
    InternalCheckError,
    ModelSetError,
    SampleTooSmallError,
    SingularParameterError,
    UnrealizablePatchError,
)
from .quadfield import QuadReal, golden, parse_quadreal, qr, sqrt_of
from .intervals import Cell, IntervalSet
from .scheme import (
    Candidate,
    CutProjectScheme,
    DeformedSample,
    LatticePoint,
    PointSample,
    WindowRegion,
    displacement_candidates,
    enumerate_half_open,
    enumerate_model_set,
    is_nonsingular,
    min_candidate_spacing,
    reproject,
    sample_to_text,
    scheme_from_config,
    star_of,
    validate_scheme,
)
from .acceptance import (
    AcceptanceDomain,
    Patch,
    acceptance_domain,
    extract_patch,
    localizing_patch,
    verify_acceptance,
)
from .deform import (
    DecompositionResult,
    LinearInternal,
    LocalRule,
    MeyerReport,
    NonslipReport,
    SumGenerator,
    Table,
    apply_generator,
    decompose_generator,
    is_strongly_pe,
    meyer_report,
    nonslip_probe,
    patch_class_key,
    rank_fraction_table,
    singular_pair,
)
from .substitution import (
    EigenData,
    EigenEntry,
    LengthVector,
    SubstitutionSystem,
    abelianization_matrix,
    char_poly,
    deformed_lengths,
    doubled_fibonacci,
    eigen_system,
    expand,
    natural_lengths,
    realize,
    section7_experiment,
    supertile_length,
)

__version__ = "0.1.0"
