"""Discount-function analysis: impatience indices, comparative orderings,
mixtures, and certainty-equivalent hyperbolic rates.

The package measures how fast impatience declines along a discount
function D(t): the rate of time preference r = -D'/D, the rate of
impatience -D''/D', and their difference, the index of declining
impatience I = -r'/r.  On top of these it provides classification
(declining / constant / increasing impatience), pairwise comparison by
convex transforms in log-discount space, weighted mixtures with an exact
index decomposition, and certainty-equivalent rates for probability
bundles of hyperbolic or exponential discounters.

Front ends: an HTTP service (``impatience.service``) and a CLI
(``impatience.cli``) that is a thin client of the service.
"""

from .ce import (
    CEReport,
    HyperbolicBundle,
    arithmetic_mean_rate,
    asymptotic_constant,
    bundle_from_dict,
    bundle_from_json,
    bundle_to_dict,
    bundle_to_json,
    ce_discount,
    ce_exponential_rate,
    ce_hyperbolic_rate,
    exponential_mixture,
    two_rate_closed_form,
    verify_ce_monotone,
    weighted_harmonic_mean,
)
from .comparison import (
    ComparisonVerdict,
    DIClassification,
    DIRelation,
    DIVerdict,
    classify,
    compare_by_index,
    convex_transform_test,
    fit_equal_DI_exponent,
    invert_discount,
    is_present_biased,
)
from .discount import (
    CustomSpec,
    DiscountFunction,
    Exponential,
    GeneralizedHyperbolic,
    ProportionalHyperbolic,
    RateProfile,
    SlowWeibull,
    TabulatedSpec,
    ZeroSpeedHyperbolic,
    default_fd_step,
    derivatives,
    evaluate,
    impatience_rate,
    index_from_rate,
    index_of_DI,
    rate_profile,
    spec_from_dict,
    spec_from_json,
    spec_to_dict,
    spec_to_json,
    time_preference_rate,
)
from .errors import (
    DegenerateInput,
    DegenerateMixture,
    DomainError,
    EmptyMixture,
    GridError,
    GridTooCoarse,
    ImpatienceError,
    InvalidBundle,
    InvalidParameters,
    InversionFailure,
    NegativeTime,
    NonpositiveTime,
    NotComparable,
    ParseError,
    SchemaError,
    SingularPoint,
    StepUnderflow,
    WeightError,
)
from .grids import TimeGrid
from .mixtures import (
    DecompositionReport,
    MixtureSpec,
    TheoremCheck,
    decompose_index,
    mix,
    mixture_from_dict,
    mixture_from_json,
    mixture_rate,
    mixture_to_dict,
    mixture_to_json,
    verify_theorem_main,
)
from .scenarios import (
    ScenarioResult,
    figure1,
    figure2,
    figure3,
    household,
    run_analyze,
    run_ce,
    run_compare,
    run_mix,
)
from .svg import PlotStyle, render_svg

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # discount functions
    "DiscountFunction",
    "Exponential",
    "GeneralizedHyperbolic",
    "ProportionalHyperbolic",
    "ZeroSpeedHyperbolic",
    "SlowWeibull",
    "CustomSpec",
    "TabulatedSpec",
    "evaluate",
    "derivatives",
    "default_fd_step",
    "time_preference_rate",
    "impatience_rate",
    "index_of_DI",
    "index_from_rate",
    "rate_profile",
    "RateProfile",
    "spec_from_dict",
    "spec_to_dict",
    "spec_from_json",
    "spec_to_json",
    # classification and comparison
    "DIVerdict",
    "DIRelation",
    "DIClassification",
    "ComparisonVerdict",
    "classify",
    "is_present_biased",
    "compare_by_index",
    "convex_transform_test",
    "invert_discount",
    "fit_equal_DI_exponent",
    # mixtures
    "MixtureSpec",
    "mix",
    "mixture_rate",
    "decompose_index",
    "DecompositionReport",
    "verify_theorem_main",
    "TheoremCheck",
    "mixture_from_dict",
    "mixture_to_dict",
    "mixture_from_json",
    "mixture_to_json",
    # certainty-equivalent aggregation
    "HyperbolicBundle",
    "CEReport",
    "ce_discount",
    "ce_hyperbolic_rate",
    "two_rate_closed_form",
    "weighted_harmonic_mean",
    "arithmetic_mean_rate",
    "asymptotic_constant",
    "ce_exponential_rate",
    "exponential_mixture",
    "verify_ce_monotone",
    "bundle_from_dict",
    "bundle_to_dict",
    "bundle_from_json",
    "bundle_to_json",
    # grids, scenarios, charts
    "TimeGrid",
    "ScenarioResult",
    "run_analyze",
    "run_compare",
    "run_mix",
    "run_ce",
    "figure1",
    "figure2",
    "figure3",
    "household",
    "PlotStyle",
    "render_svg",
    # errors
    "ImpatienceError",
    "ParseError",
    "SchemaError",
    "DomainError",
    "NegativeTime",
    "NonpositiveTime",
    "InvalidParameters",
    "SingularPoint",
    "StepUnderflow",
    "GridError",
    "GridTooCoarse",
    "InversionFailure",
    "DegenerateInput",
    "WeightError",
    "EmptyMixture",
    "NotComparable",
    "InvalidBundle",
    "DegenerateMixture",
]
