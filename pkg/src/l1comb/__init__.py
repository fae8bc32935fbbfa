"""Combings, displacement kernels, and uniformly bounded affine actions on
finitely presented groups, certified numerically at desk scale."""

from .groups import (
    BallCapError,
    CayleyBall,
    DistanceRangeError,
    GroupPresentation,
    OutOfBallError,
    PresentationError,
    WordError,
    ball,
    free_reduce,
    invert,
    multiply,
    parse_presentation,
    reduce_word,
    word_distance,
)
from .bicombing import (
    AreaScanResult,
    BicombingSpec,
    Chain1,
    QuasiGeodesicConstants,
    TriplePolicy,
    antisymmetrize,
    area,
    boundary,
    chain_dump,
    chain_l1_norm,
    combing_chain,
    empirical_area_constant,
    make_bicombing,
    quasi_geodesic_constants,
    translate_chain,
)
from .kernel import (
    DisplacementKernel,
    FeatureVector,
    NonIntegralChainError,
    cnd_min_eigenvalue,
    displacement_decomposition,
    displacement_excess,
    empirical_displacement_constant,
    feature_embed,
    kernel_cross_validate,
    kernel_dump,
    kernel_from_bicombing,
    two_triangle_bound,
)
from .espace import (
    BoundCheck,
    EVector,
    MeanZeroError,
    NonCndFormError,
    NormReport,
    NormRow,
    OpNormConfig,
    OpNormResult,
    PropernessError,
    SupportEscapeError,
    check_cocycle_identity,
    cocycle,
    norm_e,
    norm_f,
    op_norm_lower_bound,
    per_vector_bound_check,
    properness_report,
    quadratic_form,
    rep_apply,
    uniform_bound,
)
from .actions import (
    ActionError,
    GrowthReport,
    QuasiTreeKernelInput,
    QuasiTreeReport,
    TreeActionSpec,
    orbit_growth_report,
    orbit_kernel,
    parse_action,
    parse_quasitree_csv,
    validate_quasitree_kernel,
)

__version__ = "0.1.0"
