"""Weighted Bergman kernels, metrics, curvatures and minimum integrals on
bounded Reinhardt domains, with closed-form ball references and quantitative
squeezing bounds."""

from .ball_oracle import (
    BallAutomorphism,
    BallReference,
    BoundsReport,
    SandwichReport,
    SqueezingBound,
    ball_automorphism,
    ball_closed_forms,
    ball_constant,
    ball_min_integrals_origin,
    caratheodory_origin,
    inclusion_sandwich,
    squeezing_bounds,
)
from .core import (
    DomainSpec,
    ModelConfig,
    MultiIndex,
    PointVec,
    WeightSpec,
    monomial_jet,
    multiindex_count,
    multiindex_enumerate,
)
from .errors import (
    BergmanLabError,
    ConfigError,
    DependentDirections,
    IllConditioned,
    MomentUnderflow,
    NonConvergent,
    NotPositiveDefinite,
    OutsideDomain,
    RegionGuard,
    TruncationInsufficient,
    ZeroVector,
)
from .kernel_engine import (
    BergmanModel,
    CurvatureReport,
    KernelJet,
    MetricData,
    build_model,
    canonical_functions,
    curvature_bisectional,
    inner_product,
    kernel_jet,
    length2,
    metric,
    ricci,
)
from .min_integrals import (
    Constraint,
    CrosscheckReport,
    MinIntegralReport,
    RepresentationVectors,
    bergman_fuks_crosscheck,
    min_integral_oracle,
    min_integrals,
    representation_vectors,
)
from .moments import (
    MomentTable,
    build_moment_table,
    moment_closed_form,
    moment_quadrature,
)
from .verify import SUITES, SuiteResult, run_suite

__version__ = "0.1.0"

__all__ = [
    "BallAutomorphism", "BallReference", "BergmanLabError", "BergmanModel",
    "BoundsReport", "ConfigError", "Constraint", "CrosscheckReport",
    "CurvatureReport", "DependentDirections", "DomainSpec", "IllConditioned",
    "KernelJet", "MetricData", "MinIntegralReport", "ModelConfig",
    "MomentTable", "MomentUnderflow", "MultiIndex", "NonConvergent",
    "NotPositiveDefinite", "OutsideDomain", "PointVec", "RegionGuard",
    "RepresentationVectors", "SandwichReport", "SqueezingBound", "SuiteResult",
    "SUITES", "TruncationInsufficient", "WeightSpec", "ZeroVector",
    "ball_automorphism", "ball_closed_forms", "ball_constant",
    "ball_min_integrals_origin", "bergman_fuks_crosscheck", "build_model",
    "build_moment_table", "canonical_functions", "caratheodory_origin",
    "curvature_bisectional", "inclusion_sandwich", "inner_product",
    "kernel_jet", "length2", "metric", "min_integral_oracle", "min_integrals",
    "moment_closed_form", "moment_quadrature", "monomial_jet",
    "multiindex_count", "multiindex_enumerate", "representation_vectors",
    "ricci", "run_suite", "squeezing_bounds",
]
