"""Numerical toolkit for sharp Bohr-type radii of holomorphic self-maps of l_t balls.

Radii come from minimal roots of transcendental equations; inequalities are
checked on slice coefficients extracted by a discrete Cauchy integral.
"""

from .errors import (
    BohrLabError,
    InvalidMapError,
    NoRootError,
    PreconditionError,
    SharpnessProbeError,
    WeightConditionError,
)
from .functionals import (
    THEOREMS,
    FunctionalReport,
    PolynomialWeights,
    check_weight_condition,
    cs_constant,
    mp_constant,
    thm_lhs,
    weight_condition_lhs,
)
from .geometry import (
    MapDescriptor,
    SchwarzMapSpec,
    lt_norm,
    map_eval,
    mobius_map,
    sample_boundary,
    support_functional,
)
from .radius import (
    FAMILIES,
    RBR,
    R2,
    R3,
    ClassicalRN,
    ClassicalRNPrime,
    PsiE,
    RadiusResult,
    RPkm,
    Xi,
    minimal_root,
)
from .slice_engine import SliceCoefficients, extract_slice, mobius_slice
from .verification import (
    VerificationPlan,
    VerificationResult,
    area_integral_check,
    probe_sharpness,
    verify_below_radius,
)

__version__ = "0.1.0"

__all__ = [
    "SliceCoefficients",
    "extract_slice",
    "mobius_slice",
    "BohrLabError",
    "InvalidMapError",
    "NoRootError",
    "PreconditionError",
    "SharpnessProbeError",
    "WeightConditionError",
    "THEOREMS",
    "FunctionalReport",
    "PolynomialWeights",
    "check_weight_condition",
    "cs_constant",
    "mp_constant",
    "thm_lhs",
    "weight_condition_lhs",
    "MapDescriptor",
    "SchwarzMapSpec",
    "lt_norm",
    "map_eval",
    "mobius_map",
    "sample_boundary",
    "support_functional",
    "FAMILIES",
    "RBR",
    "R2",
    "R3",
    "ClassicalRN",
    "ClassicalRNPrime",
    "PsiE",
    "RadiusResult",
    "RPkm",
    "Xi",
    "minimal_root",
    "VerificationPlan",
    "VerificationResult",
    "area_integral_check",
    "probe_sharpness",
    "verify_below_radius",
]
