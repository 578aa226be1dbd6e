"""Preferential-voting tallies over Llull paired-comparison matrices.

Ranked ballots are aggregated into a matrix of pairwise support rates,
projected onto the chain-like structure that single-choice elections
produce, and rated by maximum-likelihood paired-comparison strengths.
"""

from .ballots import (
    RESERVED_CHARS,
    Ballot,
    BallotSet,
    TiePolicy,
    aggregate,
    contract,
    is_autonomous,
    parse_ballots,
    restrict_ballots,
)
from .errors import (
    BadRepresentativeError,
    BallotSyntaxError,
    EmptyProfileError,
    EmptySubsetError,
    HypothesisNotSatisfiedError,
    InternalError,
    LlullError,
    MatrixFormatError,
    MatrixValidationError,
    MaxIterExceededError,
    NoTopDominantComponentError,
    NonPositiveStrengthError,
    NotAnImprovementError,
    NotAPermutationError,
    NotAutonomousError,
    NotCLCError,
    NotIrreducibleError,
    ParseError,
    PowerIterationDivergedError,
    ProjectionPostconditionViolatedError,
    SingleOptionWarning,
    TieGroupTooLargeError,
    UndefinedRatioError,
    UnknownOptionError,
    ZeroTurnoutError,
)
from .matrix import (
    RATE_KINDS,
    VALIDATION_TOL,
    LlullMatrix,
    RateVector,
    margins_turnouts,
    mean_preference_scores,
    mean_ranks,
    mean_relative_scores,
    ratios,
    relative_scores,
    restrict,
)
from .options import OptionSet
from .projection import (
    FIXED_POINT_TOL,
    ProjectionChecks,
    ProjectionResult,
    clc_project,
    verify_projection,
)
from .rates import (
    CheckReport,
    RateReport,
    check_clone_consistency,
    check_decomposition,
    check_majority,
    check_monotonicity,
    check_strength_score_compatibility,
    eigenvector_rates,
    fraction_like_rates,
    unanimous_sets,
)
from .structure import (
    CLC_CONDITIONS,
    STRUCT_TOL,
    TIE_GROUP_CAP,
    AdmissibleOrder,
    ClcVerdict,
    ClcWitness,
    IndirectScores,
    StructureReport,
    analyze_structure,
    check_clc,
    components,
    find_admissible_order,
    indirect_scores,
    zero_turnout_split,
)
from .zermelo import (
    SolveDiagnostics,
    SolverConfig,
    Strengths,
    log_likelihood,
    log_likelihood_gradient,
    log_likelihood_hessian,
    residual_vector,
    solve,
    solve_irreducible,
    subset_defect,
    tangent_hessian_max_eigenvalue,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleOrder",
    "BadRepresentativeError",
    "Ballot",
    "BallotSet",
    "BallotSyntaxError",
    "CheckReport",
    "ClcVerdict",
    "ClcWitness",
    "CLC_CONDITIONS",
    "EmptyProfileError",
    "EmptySubsetError",
    "FIXED_POINT_TOL",
    "HypothesisNotSatisfiedError",
    "IndirectScores",
    "InternalError",
    "LlullError",
    "LlullMatrix",
    "MatrixFormatError",
    "MatrixValidationError",
    "MaxIterExceededError",
    "NoTopDominantComponentError",
    "NonPositiveStrengthError",
    "NotAnImprovementError",
    "NotAPermutationError",
    "NotAutonomousError",
    "NotCLCError",
    "NotIrreducibleError",
    "OptionSet",
    "ParseError",
    "PowerIterationDivergedError",
    "ProjectionChecks",
    "ProjectionPostconditionViolatedError",
    "ProjectionResult",
    "RATE_KINDS",
    "RESERVED_CHARS",
    "RateReport",
    "RateVector",
    "STRUCT_TOL",
    "SingleOptionWarning",
    "SolveDiagnostics",
    "SolverConfig",
    "Strengths",
    "StructureReport",
    "TIE_GROUP_CAP",
    "TiePolicy",
    "TieGroupTooLargeError",
    "UndefinedRatioError",
    "UnknownOptionError",
    "VALIDATION_TOL",
    "ZeroTurnoutError",
    "aggregate",
    "analyze_structure",
    "check_clc",
    "check_clone_consistency",
    "check_decomposition",
    "check_majority",
    "check_monotonicity",
    "check_strength_score_compatibility",
    "clc_project",
    "components",
    "contract",
    "eigenvector_rates",
    "find_admissible_order",
    "fraction_like_rates",
    "indirect_scores",
    "is_autonomous",
    "log_likelihood",
    "log_likelihood_gradient",
    "log_likelihood_hessian",
    "margins_turnouts",
    "mean_preference_scores",
    "mean_ranks",
    "mean_relative_scores",
    "parse_ballots",
    "ratios",
    "relative_scores",
    "residual_vector",
    "restrict",
    "restrict_ballots",
    "solve",
    "solve_irreducible",
    "subset_defect",
    "tangent_hessian_max_eigenvalue",
    "unanimous_sets",
    "verify_projection",
    "zero_turnout_split",
]
