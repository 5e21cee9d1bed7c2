"""beliefkit: exact-arithmetic analyses of finite type spaces.

Finite measurable spaces with atomic sigma-fields, type spaces with belief
operators and completeness checking, recursive belief hierarchies with
coherency and quotients, type-morphism verification and search, and interim
rationalizability for Bayesian games.  Everything runs on `Fraction`s; no
tolerances anywhere.
"""

from .errors import BeliefKitError
from .game import (
    BayesianGame,
    RationalizabilityResult,
    interim_rationalizable,
    rationalizable_actions,
    validate_game,
)
from .hierarchy import (
    HierarchyAnalysis,
    HierarchyLevel,
    HierarchyProfile,
    QuotientResult,
    all_profiles,
    canonical_hierarchy,
    coherency_check,
    find_duplicates,
    first_order_belief,
    hierarchy_analysis,
    hierarchy_profile,
    nth_order_belief,
    quotient,
    stabilization_depth,
)
from .io import (
    fixture_path,
    load_fixture_game,
    load_fixture_model,
    parse_game,
    parse_model,
    serialize_game,
    serialize_model,
)
from .measure import (
    Measure,
    MeasurableMap,
    Space,
    belief_event_contains,
    dirac,
    discrete_space,
    induced_field,
    is_measurable,
    make_map,
    make_space,
    marginal,
    measure_of,
    product_measure,
    product_space,
    pushforward,
    sigma_join,
    uniform,
)
from .morphism import (
    MorphismReport,
    TerminalityReport,
    TypeMorphism,
    check_morphism,
    find_morphisms,
    is_isomorphism,
    verify_terminality_small,
)
from .typespace import (
    CompletenessVerdict,
    TypeSpace,
    ValidationReport,
    belief_operator,
    check_completeness,
    common_belief,
    minus_i_field,
    mutual_belief,
    validate_type_space,
)

__version__ = "0.1.0"
