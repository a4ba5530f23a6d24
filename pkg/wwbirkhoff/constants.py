"""
wwbirkhoff Numeric Constants

Tolerances and fixed numeric tables shared by every module.

============================================================================
CONVENTIONS
============================================================================

Fourier coefficients carry the (2π)^(-1/2) normalisation:

    u(x) = Σ_k u_k e^{ikx} / √(2π),    u_k = (2π)^(-1/2) ∫ u(x) e^{-ikx} dx

so that ∫|u|² dx = Σ|u_k|² and the coefficient tables of the water-waves
expansion compare entry by entry. Mode 0 never appears.

Signs are the integers +1 (factor u_k) and -1 (factor ū_k).

============================================================================
"""

import math
from types import MappingProxyType

PLUS = 1
MINUS = -1
SIGNS = (PLUS, MINUS)

SQRT2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)

# Smallest |phase| of a momentum-conserving cubic tuple, attained by
# (1, 1, 2) with signs (+, +, -): 2 - √2 = 2 / (2 + √2)
CUBIC_PHASE_BOUND = 2.0 / (2.0 + SQRT2)

# Wrapped in MappingProxyType to prevent runtime mutation
TOLERANCES: MappingProxyType = MappingProxyType({
    # coefficients below this magnitude are dropped from sparse Hamiltonians
    "prune": 1e-15,
    # implicit midpoint fixed point
    "fixed_point": 1e-13,
    # |phase| window inside which the exact integer test decides
    "exact_screen": 1e-9,
    # reality check on evaluated Hamiltonians, relative to magnitude
    "reality": 1e-12,
    # Birkhoff identity on matched coefficients
    "identity": 1e-9,
    # Benjamin-Feir coefficients relative to the largest coefficient
    "null_condition": 1e-10,
})

FIXED_POINT_MAX_ITER = 50

# Amplitude guard on ||u||_{L²} and blowup factor for trajectory runs
AMPLITUDE_GUARD = 0.5
BLOWUP_FACTOR = 10.0

# Admissible cutoff width of the discrete Bony-Weyl paraproduct
PARAPRODUCT_DELTA = 0.1

# Profile decay |u_k| ∝ exp(-|k| / RANDOM_PROFILE_SCALE) for random data
RANDOM_PROFILE_SCALE = 4.0

# Norm-growth runs stop at min(horizon, GROWTH_HORIZON_CONSTANT * ε^-3)
GROWTH_HORIZON_CONSTANT = 1.0


class ConstantsValidationError(Exception):
    """Raised when a constant table is inconsistent."""
    pass


def validate_constants() -> bool:
    """
    Check the constant tables for internal consistency.

    Returns:
        True if all tables are consistent

    Raises:
        ConstantsValidationError: If any check fails
    """
    for name, value in TOLERANCES.items():
        if not (0.0 < value < 1e-3):
            raise ConstantsValidationError(f"TOLERANCES[{name}] out of range: {value}")

    if TOLERANCES["prune"] >= TOLERANCES["identity"]:
        raise ConstantsValidationError("pruning threshold must sit below the identity tolerance")

    # the screening window must be far wider than double rounding on √ sums
    # and far narrower than the cubic bound
    if not (1e-12 < TOLERANCES["exact_screen"] < CUBIC_PHASE_BOUND):
        raise ConstantsValidationError("exact_screen window inconsistent")

    if abs(CUBIC_PHASE_BOUND - (2.0 - SQRT2)) > 1e-15:
        raise ConstantsValidationError("CUBIC_PHASE_BOUND does not equal 2 - √2")

    if not (0.0 < PARAPRODUCT_DELTA < 0.5):
        raise ConstantsValidationError(f"PARAPRODUCT_DELTA out of range: {PARAPRODUCT_DELTA}")

    if FIXED_POINT_MAX_ITER < 1 or BLOWUP_FACTOR <= 1.0:
        raise ConstantsValidationError("integrator limits out of range")

    return True


if __name__ == "__main__":
    if validate_constants():
        print("constants OK")
