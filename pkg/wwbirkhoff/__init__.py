"""
wwbirkhoff - Water-Waves Birkhoff Normal Form Engine
===================================================

Fourier-truncated infinite-depth gravity water waves in 1-D, expanded to
quartic order, reduced to Birkhoff normal form and compared with the
integrable Zakharov-Dyachenko Hamiltonian.

Features:
    - Sparse polynomial Hamiltonians in complex mode variables with
      Poisson brackets and cohomological solves
    - Dirichlet-Neumann expansion to G₂, pseudo-spectral energies and flows
    - Exact integer classification of ω(k) = √|k| resonances
      (trivial and Benjamin-Feir families) and small-divisor scans
    - Normal-form identity and Benjamin-Feir null-condition checks
    - RK4 and implicit-midpoint integration with invariant tracking

Usage:
    from wwbirkhoff import verify_identity, enumerate_quartic

    report = verify_identity(8)
    assert report.passed

    for t, c in enumerate_quartic(10):
        print(t, c.kind.value)
"""

__version__ = "0.3.0"
__author__ = "wwbirkhoff developers"
__license__ = "Apache-2.0"

from wwbirkhoff.constants import TOLERANCES, validate_constants

# Spectral core
from wwbirkhoff.spectral_core import (
    SpectralField,
    Dispersion,
    RealPair,
    ComplexPair,
    sobolev_norm,
    apply_multiplier,
    pointwise_product,
    to_complex,
    from_complex,
    # Exceptions
    SpectralError,
    ZeroModeError,
    TruncationError,
    RealityError,
)

# Polynomial Hamiltonians
from wwbirkhoff.poly_hamiltonian import (
    SignedMode,
    Monomial,
    PolyHamiltonian,
    VectorFieldSpec,
    evaluate,
    gradient,
    poisson_bracket,
    hamiltonian_vector_field,
    project_kernel,
    solve_cohomological,
    dumps,
    loads,
    # Exceptions
    HamiltonianError,
    MomentumError,
    ResonantDivisorError,
    SerializationError,
)

# Resonances
from wwbirkhoff.resonance import (
    SignedTuple,
    ResonanceKind,
    ResonanceClass,
    phase,
    is_exact_zero,
    benjamin_feir,
    classify,
    enumerate_quartic,
    resonant_monomial_support,
    min_cubic_phase,
    small_divisor_scan,
    SmallDivisorTable,
    ResonanceError,
)

# Water-waves expansion
from wwbirkhoff.ww_expansion import (
    DNOrder,
    PseudoSpectralGrid,
    dn_apply,
    rhs_quadratic,
    build_hamiltonian,
    quartic_coefficient,
    extract_bilinear,
    coefficient_table,
    CoefficientTable,
    ExpansionError,
    UnknownFunctionalError,
)

# Normal form
from wwbirkhoff.birkhoff import (
    NormalFormReport,
    compute_normal_form,
    explicit_hzd4,
    action_form_hzd4,
    verify_identity,
    verify_null_condition,
    ActionFrequencyMap,
    zd_frequency,
    transport_split,
    zeta,
    NormalFormError,
)

# Dynamics
from wwbirkhoff.dynamics import (
    IntegratorConfig,
    TrajectoryRecord,
    WaterWavesFlow,
    ZakharovDyachenkoFlow,
    PolynomialFlow,
    integrate,
    integrate_ww,
    integrate_zd_exact,
    integrate_zd_numeric,
    random_initial_datum,
    norm_growth_experiment,
    DynamicsError,
    BlowupError,
    ConvergenceError,
)

# Configuration
from wwbirkhoff.config import RunConfig, load_config, ConfigError

__all__ = [
    # Version
    "__version__",
    # Constants
    "TOLERANCES",
    "validate_constants",
    # Spectral core
    "SpectralField",
    "Dispersion",
    "RealPair",
    "ComplexPair",
    "sobolev_norm",
    "apply_multiplier",
    "pointwise_product",
    "to_complex",
    "from_complex",
    "SpectralError",
    "ZeroModeError",
    "TruncationError",
    "RealityError",
    # Polynomial Hamiltonians
    "SignedMode",
    "Monomial",
    "PolyHamiltonian",
    "VectorFieldSpec",
    "evaluate",
    "gradient",
    "poisson_bracket",
    "hamiltonian_vector_field",
    "project_kernel",
    "solve_cohomological",
    "dumps",
    "loads",
    "HamiltonianError",
    "MomentumError",
    "ResonantDivisorError",
    "SerializationError",
    # Resonances
    "SignedTuple",
    "ResonanceKind",
    "ResonanceClass",
    "phase",
    "is_exact_zero",
    "benjamin_feir",
    "classify",
    "enumerate_quartic",
    "resonant_monomial_support",
    "min_cubic_phase",
    "small_divisor_scan",
    "SmallDivisorTable",
    "ResonanceError",
    # Water-waves expansion
    "DNOrder",
    "PseudoSpectralGrid",
    "dn_apply",
    "rhs_quadratic",
    "build_hamiltonian",
    "quartic_coefficient",
    "extract_bilinear",
    "coefficient_table",
    "CoefficientTable",
    "ExpansionError",
    "UnknownFunctionalError",
    # Normal form
    "NormalFormReport",
    "compute_normal_form",
    "explicit_hzd4",
    "action_form_hzd4",
    "verify_identity",
    "verify_null_condition",
    "ActionFrequencyMap",
    "zd_frequency",
    "transport_split",
    "zeta",
    "NormalFormError",
    # Dynamics
    "IntegratorConfig",
    "TrajectoryRecord",
    "WaterWavesFlow",
    "ZakharovDyachenkoFlow",
    "PolynomialFlow",
    "integrate",
    "integrate_ww",
    "integrate_zd_exact",
    "integrate_zd_numeric",
    "random_initial_datum",
    "norm_growth_experiment",
    "DynamicsError",
    "BlowupError",
    "ConvergenceError",
    # Configuration
    "RunConfig",
    "load_config",
    "ConfigError",
]
