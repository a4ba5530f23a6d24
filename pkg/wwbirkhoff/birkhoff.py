"""
Birkhoff Normal Form
====================

Quartic Birkhoff normal form of the truncated water-waves Hamiltonian and
its comparison with the integrable Zakharov-Dyachenko Hamiltonian.

The normal form is

    H_ZD⁴ = Π_ker( H⁴ + ½ {F³, H³} ),    {F³, H²} + H³ = 0

where Π_ker keeps the exactly resonant monomials. H³ and F³ are built at
the intermediate truncation 2M, so every cubic interaction that lands on a
quartic monomial inside |k| <= M is present; the bracket is only evaluated
on the resonant support.

The closed form it is checked against is

    (1/4π) Σ_k |k|³ (|z_k|⁴ - 2|z_k|²|z_{-k}|²)
      + (1/π) Σ_{sign k1 = sign k2, |k2| < |k1|} |k1||k2|² (|z_{k1}|² - |z_{-k1}|²) |z_{k2}|²

Both k and -k feed the |z_k|²|z_{-k}|² monomial, so its canonical
coefficient is -|k|³/π.

Usage:
    from wwbirkhoff.birkhoff import verify_identity

    report = verify_identity(8, tol=1e-9)
    print(report.to_json())
"""

from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import DefaultDict, Dict, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np

try:
    import jsonschema
    HAS_JSONSCHEMA = True
except ImportError:
    HAS_JSONSCHEMA = False

from .constants import TOLERANCES
from .poly_hamiltonian import (
    Monomial,
    PolyHamiltonian,
    evaluate_array,
    poisson_bracket,
    project_kernel,
    solve_cohomological,
)
from .resonance import benjamin_feir, resonant_monomial_support
from .spectral_core import Dispersion, mode_array, mode_position
from .ww_expansion import build_hamiltonian

logger = logging.getLogger(__name__)

__all__ = [
    "NormalFormError",
    "BFCoefficient",
    "NormalFormReport",
    "REPORT_SCHEMA",
    "compute_normal_form",
    "explicit_hzd4",
    "action_form_hzd4",
    "verify_identity",
    "verify_null_condition",
    "bf_tuples_within",
    "ActionFrequencyMap",
    "zd_frequency",
    "transport_split",
    "zeta",
]


class NormalFormError(ValueError):
    """Raised on invalid normal-form requests."""
    pass


# =============================================================================
# NORMAL FORM
# =============================================================================

def compute_normal_form(
    M: int,
    quartic: Optional[PolyHamiltonian] = None,
    workers: int = 1,
) -> PolyHamiltonian:
    """
    Π_ker(H⁴ + ½{F³, H³}) at truncation M.

    Args:
        M: Truncation, >= 2
        quartic: Replacement for H⁴ (used to test the verifier); defaults to
            the water-waves quartic term on the resonant support
        workers: Threads for the resonance scan

    Returns:
        Real, momentum-conserving, degree-4 Hamiltonian supported on exact
        resonances
    """
    if M < 2:
        raise NormalFormError(f"truncation must be >= 2, got {M}")
    support = resonant_monomial_support(M, workers)
    targets = [Monomial.of(*factors) for factors in support]
    logger.info("normal form at M=%d: %d resonant monomials", M, len(targets))

    H3 = build_hamiltonian(2 * M, 3)
    F3 = solve_cohomological(H3)
    H4 = quartic if quartic is not None else build_hamiltonian(M, 4, support)
    bracket = poisson_bracket(F3, H3, targets)

    result = project_kernel(H4.restrict(lambda m: m.max_mode <= M) + bracket.scale(0.5))
    logger.info("normal form at M=%d has %d terms", M, len(result))
    return result


def explicit_hzd4(M: int) -> PolyHamiltonian:
    """Closed-form quartic Zakharov-Dyachenko Hamiltonian restricted to |k| <= M."""
    if M < 1:
        raise NormalFormError(f"truncation must be >= 1, got {M}")
    acc: DefaultDict[Monomial, complex] = defaultdict(complex)
    modes = [int(k) for k in mode_array(M)]
    for k in modes:
        c = abs(k) ** 3 / (4.0 * math.pi)
        acc[Monomial.action(k, k)] += c
        acc[Monomial.action(k, -k)] += -2.0 * c
    for k1 in modes:
        for k2 in modes:
            if (k1 > 0) != (k2 > 0) or abs(k2) >= abs(k1):
                continue
            c = abs(k1) * k2 * k2 / math.pi
            acc[Monomial.action(-k1, k2)] -= c
            acc[Monomial.action(k1, k2)] += c
    return PolyHamiltonian(acc)


def _add_product(
    acc: DefaultDict[Monomial, complex],
    coef: float,
    left: Mapping[int, float],
    right: Mapping[int, float],
) -> None:
    for a, wa in left.items():
        for b, wb in right.items():
            acc[Monomial.action(a, b)] += coef * wa * wb


def action_form_hzd4(M: int) -> PolyHamiltonian:
    """
    The same Hamiltonian written in I₁(k) = (|z_k|²+|z_{-k}|²)/2 and
    I₂(k) = (|z_k|²-|z_{-k}|²)/2, k > 0:

        Σ_k (-k³/2π)(I₁² - 3I₂²) + (4/π) Σ_{0<k<l} k² l I₂(k) I₂(l)

    expanded back into action monomials.
    """
    if M < 1:
        raise NormalFormError(f"truncation must be >= 1, got {M}")
    I1 = {k: {k: 0.5, -k: 0.5} for k in range(1, M + 1)}
    I2 = {k: {k: 0.5, -k: -0.5} for k in range(1, M + 1)}
    acc: DefaultDict[Monomial, complex] = defaultdict(complex)
    for k in range(1, M + 1):
        c = -(k ** 3) / (2.0 * math.pi)
        _add_product(acc, c, I1[k], I1[k])
        _add_product(acc, -3.0 * c, I2[k], I2[k])
        for l in range(k + 1, M + 1):
            _add_product(acc, 4.0 * k * k * l / math.pi, I2[k], I2[l])
    return PolyHamiltonian.collect(acc)


# =============================================================================
# BENJAMIN-FEIR NULL CONDITION
# =============================================================================

class BFCoefficient(NamedTuple):
    lam: int
    b: int
    coeff_abs: float

    def to_dict(self) -> Dict:
        return {"lambda": self.lam, "b": self.b, "coeff_abs": self.coeff_abs}


def bf_tuples_within(M: int) -> List[Tuple[int, int]]:
    """(λ, b) of every BF(λ, b) whose modes all satisfy |n| <= M."""
    out = []
    b = 1
    while (b * b + b + 1) ** 2 <= M:
        top = (b * b + b + 1) ** 2
        for lam in range(1, M // top + 1):
            out.extend(((-lam, b), (lam, b)))
        b += 1
    return sorted(out, key=lambda p: (p[1], abs(p[0]), p[0]))


def verify_null_condition(
    M: int,
    normal_form: Optional[PolyHamiltonian] = None,
    workers: int = 1,
) -> List[BFCoefficient]:
    """
    Coefficient magnitudes of every Benjamin-Feir monomial inside |n| <= M.

    Returns:
        One entry per (λ, b); the larger of the monomial and its conjugate
    """
    pairs = bf_tuples_within(M)
    if not pairs:
        return []
    nf = normal_form if normal_form is not None else compute_normal_form(M, workers=workers)
    out = []
    for lam, b in pairs:
        m = Monomial.of(*benjamin_feir(lam, b).factors())
        magnitude = max(abs(nf.coefficient(m)), abs(nf.coefficient(m.conjugate())))
        out.append(BFCoefficient(lam, b, magnitude))
    return out


# =============================================================================
# IDENTITY REPORT
# =============================================================================

REPORT_SCHEMA: Dict = {
    "type": "object",
    "required": [
        "M",
        "max_resonant_coeff_error",
        "max_offresonant_leak",
        "bf",
        "pass",
        "max_value_error",
        "tolerance",
    ],
    "properties": {
        "M": {"type": "integer", "minimum": 2},
        "max_resonant_coeff_error": {"type": "number", "minimum": 0},
        "max_offresonant_leak": {"type": "number", "minimum": 0},
        "bf": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lambda", "b", "coeff_abs"],
                "properties": {
                    "lambda": {"type": "integer"},
                    "b": {"type": "integer", "minimum": 1},
                    "coeff_abs": {"type": "number", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "pass": {"type": "boolean"},
        "max_value_error": {"type": "number", "minimum": 0},
        "tolerance": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class NormalFormReport:
    """Outcome of comparing the computed normal form with the closed form."""
    M: int
    max_resonant_coeff_error: float
    max_offresonant_leak: float
    bf_coefficients: Tuple[BFCoefficient, ...]
    passed: bool
    max_value_error: float = 0.0
    tolerance: float = TOLERANCES["identity"]

    def to_dict(self) -> Dict:
        return {
            "M": self.M,
            "max_resonant_coeff_error": self.max_resonant_coeff_error,
            "max_offresonant_leak": self.max_offresonant_leak,
            "bf": [c.to_dict() for c in self.bf_coefficients],
            "pass": self.passed,
            "max_value_error": self.max_value_error,
            "tolerance": self.tolerance,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def validate_schema(self, require_schema: bool = True) -> Tuple[bool, Optional[str]]:
        """
        Validate the emitted report against REPORT_SCHEMA.

        Returns:
            (is_valid, error_message)
        """
        if not HAS_JSONSCHEMA:
            if require_schema:
                return False, "jsonschema library not installed (required for validation)"
            return True, None
        try:
            jsonschema.validate(self.to_dict(), REPORT_SCHEMA)
            return True, None
        except jsonschema.ValidationError as e:
            return False, str(e.message)


def _random_amplitudes(M: int, rng: np.random.Generator) -> np.ndarray:
    k = np.abs(mode_array(M)).astype(float)
    raw = rng.standard_normal(2 * M) + 1j * rng.standard_normal(2 * M)
    return raw * np.exp(-k / M) / math.sqrt(2 * M)


def verify_identity(
    M: int,
    tol: float = TOLERANCES["identity"],
    quartic: Optional[PolyHamiltonian] = None,
    samples: int = 20,
    seed: int = 0,
    null_tol: float = TOLERANCES["null_condition"],
    workers: int = 1,
) -> NormalFormReport:
    """
    Compare compute_normal_form(M) with explicit_hzd4(M).

    Matched monomials are compared in relative error, monomials present in
    only one of the two in absolute value, and both Hamiltonians are
    evaluated on `samples` random fields. The report passes when every
    error is strictly below tol and every Benjamin-Feir coefficient is at
    most null_tol times the largest coefficient.

    Raises:
        NormalFormError: If tol or null_tol is negative
    """
    if tol < 0 or null_tol < 0:
        raise NormalFormError(f"tolerances must be non-negative, got tol={tol}, null_tol={null_tol}")
    nf = compute_normal_form(M, quartic=quartic, workers=workers)
    ref = explicit_hzd4(M)

    coeff_error = 0.0
    leak = 0.0
    for m in set(nf) | set(ref):
        expected = ref.coefficient(m)
        got = nf.coefficient(m)
        if expected != 0:
            coeff_error = max(coeff_error, abs(got - expected) / abs(expected))
        else:
            leak = max(leak, abs(got))

    rng = np.random.default_rng(seed)
    value_error = 0.0
    for _ in range(samples):
        u = _random_amplitudes(M, rng)
        expected_value = evaluate_array(ref, u, M)
        got_value = evaluate_array(nf, u, M)
        value_error = max(value_error, abs(got_value - expected_value) / max(abs(expected_value), 1e-300))

    bf = tuple(verify_null_condition(M, normal_form=nf))
    largest = nf.max_abs_coefficient()
    null_ok = all(c.coeff_abs <= null_tol * largest for c in bf)

    passed = coeff_error < tol and leak < tol and value_error < tol and null_ok
    logger.info(
        "identity at M=%d: coeff=%.3e leak=%.3e value=%.3e pass=%s",
        M, coeff_error, leak, value_error, passed,
    )
    return NormalFormReport(
        M=M,
        max_resonant_coeff_error=coeff_error,
        max_offresonant_leak=leak,
        bf_coefficients=bf,
        passed=passed,
        max_value_error=value_error,
        tolerance=tol,
    )


# =============================================================================
# ACTION FREQUENCIES
# =============================================================================

def _action_vector(actions: Mapping[int, float], M: int) -> np.ndarray:
    I = np.zeros(2 * M)
    for k, value in actions.items():
        if value < 0:
            raise NormalFormError(f"action at mode {k} is negative: {value}")
        if k == 0 or abs(k) > M:
            raise NormalFormError(f"action mode {k} outside the truncation {M}")
        I[mode_position(k, M)] = value
    return I


@dataclass(frozen=True, eq=False)
class ActionFrequencyMap:
    """
    Frequencies Ω(I) = ω + A I of an integrable Hamiltonian
    H = Σ ω_k I_k + Σ_{a<=b} c_ab I_a I_b, so that ż_k = -i Ω_k(I) z_k.

    A_ab = c_ab for a != b and A_aa = 2 c_aa.
    """
    M: int
    omega: np.ndarray
    A: np.ndarray = field(repr=False)

    @classmethod
    def from_hamiltonian(cls, H: PolyHamiltonian, M: int) -> "ActionFrequencyMap":
        """
        Raises:
            NormalFormError: If H has a non-action monomial above the null
                tolerance, or a degree other than 2 and 4
        """
        threshold = TOLERANCES["null_condition"] * max(H.max_abs_coefficient(), 1.0)
        omega = np.zeros(2 * M)
        A = np.zeros((2 * M, 2 * M))
        for m, c in H.items():
            if not m.is_action():
                if abs(c) > threshold:
                    raise NormalFormError(f"non-action monomial {m} with coefficient {c}")
                continue
            modes = sorted(f.k for f in m.factors if f.sigma > 0)
            if m.degree == 2:
                omega[mode_position(modes[0], M)] += c.real
            elif m.degree == 4:
                a, b = (mode_position(k, M) for k in modes)
                if a == b:
                    A[a, a] += 2.0 * c.real
                else:
                    A[a, b] += c.real
                    A[b, a] += c.real
            else:
                raise NormalFormError(f"unsupported degree {m.degree} in action Hamiltonian")
        return cls(M, omega, A)

    @classmethod
    def zakharov_dyachenko(cls, M: int) -> "ActionFrequencyMap":
        """Frequencies of H² + H_ZD⁴ at truncation M."""
        d = Dispersion()
        H2 = PolyHamiltonian({Monomial.action(int(k)): d.omega(int(k)) for k in mode_array(M)})
        return cls.from_hamiltonian(H2 + explicit_hzd4(M), M)

    def frequencies(self, I: np.ndarray) -> np.ndarray:
        return self.omega + self.A @ I

    def frequency(self, n: int, actions: Mapping[int, float]) -> float:
        I = _action_vector(actions, self.M)
        return float(self.frequencies(I)[mode_position(n, self.M)])

    def energy(self, I: np.ndarray) -> float:
        return float(self.omega @ I + 0.5 * I @ self.A @ I)


def _truncation_for(n: int, actions: Mapping[int, float], M: Optional[int]) -> int:
    if n == 0:
        raise NormalFormError("mode 0 has no frequency")
    return M if M is not None else max([abs(n)] + [abs(k) for k in actions])


def zd_frequency(n: int, actions: Mapping[int, float], M: Optional[int] = None) -> float:
    """
    Ω_n(I) such that ż_n = -i Ω_n(I) z_n under H² + H_ZD⁴.

    Args:
        n: Mode
        actions: {mode: I_k >= 0}; missing modes have zero action
        M: Truncation (defaults to the largest mode involved)
    """
    M = _truncation_for(n, actions, M)
    return ActionFrequencyMap.zakharov_dyachenko(M).frequency(n, actions)


def transport_split(
    n: int,
    actions: Mapping[int, float],
    M: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Split Ω_n - ω_n into a transport part and a remainder.

    The transport part (1/π) n Σ_{|j|<|n|} j|j| I_j is the low-mode share of
    n ζ(I); the remainder collects self-interaction and |j| >= |n|.

    Returns:
        (transport, remainder)
    """
    M = _truncation_for(n, actions, M)
    shift = zd_frequency(n, actions, M) - Dispersion().omega(n)
    low = sum(j * abs(j) * I for j, I in actions.items() if abs(j) < abs(n))
    transport = n * low / math.pi
    return transport, shift - transport


def zeta(actions: Mapping[int, float]) -> float:
    """ζ(I) = (1/π) Σ n|n| I_n."""
    return sum(n * abs(n) * I for n, I in actions.items()) / math.pi
