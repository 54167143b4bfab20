"""Numerical products of one-dimensional distributions.

Distributions enter as boundary values of functions holomorphic off the real
axis; products are computed by smearing the regulated representatives at
height y against Schwartz test functions and extrapolating y -> 0.  When the
limit diverges, the package determines the Taylor subtraction order, builds
the subtracted continuation with free counterterms, and quantifies the
resulting ambiguity.
"""

from .boundary import (
    CatalogError,
    GrowthReport,
    HyperfunctionPair,
    PoleLocationError,
    RegulatorError,
    catalog,
    combine,
    derivative,
    eval_Fy,
    required_order,
    verify_growth_bound,
)
from .cli import ParseError, format_expression, parse_expression
from .extension import (
    Extension,
    ExtensionError,
    ExtensionResult,
    FactorizationReport,
    NonuniquenessTable,
    SubtractedFunction,
    counterterm_value,
    evaluate_extension,
    extension_report,
    factorization_identity_check,
    nonuniqueness_scan,
    omega_independence_check,
    taylor_subtract,
)
from .pairing import (
    InconclusivePairingError,
    NotExtendableError,
    PairingResult,
    ProductExpression,
    QuadratureError,
    RingCheckReport,
    Schedule,
    SubtractionOrder,
    Tolerances,
    divergence_order,
    limit_pairing,
    pair_at_y,
    ring_axiom_check,
    subtraction_order,
)
from .ratfun import RationalFunction
from .testfn import (
    OrderExceededError,
    PlateauCutoff,
    REFERENCE_TEST_FUNCTIONS,
    SeminormReport,
    TestFunction,
    build_plateau_cutoff,
    seminorm,
    vanish_probe,
)

__version__ = "0.1.0"
