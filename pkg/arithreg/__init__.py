"""arithreg public interface."""

from .config import RegularityConfig, load_config
from .counting import (
    Domain,
    ProductTrigPolynomial,
    Progression,
    TrigPolynomial,
    fejer_truncate,
    fejer_truncate_structured,
    geometric_sum_bounds,
    integral_estimate,
    progression_average,
    structured_average,
    structured_diagnostic,
)
from .diophantine import (
    SubtorusChart,
    ThetaDecomposition,
    TorusPoint,
    complete_unimodular,
    decompose_theta,
    find_irrational_point,
    is_irrational,
    verify_decomposition,
)
from .exceptions import (
    ApproximationError,
    ArithRegError,
    CertificateError,
    ConsistencyError,
    GrowthAuditError,
    InvalidArgumentError,
    ResourceBudgetError,
    WeakRegularityError,
)
from .factors import Factor, conditional_expectation, energy, energy_increment_step, join, weak_regularize
from .fourier import IntervalFunction, Spectrum, dft, idft, u2_norm_cyclic, u2_norm_interval
from .growth import GrowthFunction, parse_growth
from .inverse import MeasurableSet, correlating_set, large_fourier_coefficient, maximal_function
from .irrational import (
    IrrationalCertificate,
    evaluate_structured,
    regularize_irrational,
    structured_integral,
    verify_irrational_certificate,
)
from .regularity import RegularityCertificate, regularize, verify_certificate
from .reports import ClauseResult, VerificationReport
from .synth import synthesize
from .telemetry import TelemetryRecord, TelemetryReporter
from .witness import StructureWitness

__all__ = [
    # Fourier analysis
    "IntervalFunction",
    "Spectrum",
    "dft",
    "idft",
    "u2_norm_cyclic",
    "u2_norm_interval",
    # Inverse theorem
    "large_fourier_coefficient",
    "maximal_function",
    "correlating_set",
    "MeasurableSet",
    "StructureWitness",
    # Factors
    "Factor",
    "conditional_expectation",
    "energy",
    "join",
    "energy_increment_step",
    "weak_regularize",
    # Regularity
    "GrowthFunction",
    "parse_growth",
    "RegularityCertificate",
    "regularize",
    "verify_certificate",
    "ClauseResult",
    "VerificationReport",
    # Diophantine
    "TorusPoint",
    "SubtorusChart",
    "ThetaDecomposition",
    "is_irrational",
    "complete_unimodular",
    "decompose_theta",
    "verify_decomposition",
    "find_irrational_point",
    # Counting
    "TrigPolynomial",
    "ProductTrigPolynomial",
    "Progression",
    "Domain",
    "fejer_truncate",
    "fejer_truncate_structured",
    "progression_average",
    "geometric_sum_bounds",
    "structured_average",
    "structured_diagnostic",
    "integral_estimate",
    # Irrational regularity
    "IrrationalCertificate",
    "regularize_irrational",
    "verify_irrational_certificate",
    "evaluate_structured",
    "structured_integral",
    # Configuration, telemetry, inputs
    "RegularityConfig",
    "load_config",
    "TelemetryRecord",
    "TelemetryReporter",
    "synthesize",
    # Errors
    "ArithRegError",
    "InvalidArgumentError",
    "ConsistencyError",
    "ResourceBudgetError",
    "ApproximationError",
    "WeakRegularityError",
    "GrowthAuditError",
    "CertificateError",
]
