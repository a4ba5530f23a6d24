"""
Polynomial Hamiltonians
=======================

Sparse homogeneous polynomials in the complex mode variables u_k, ū_k.

A Monomial is a sorted multiset of SignedMode(k, σ); σ = +1 stands for u_k
and σ = -1 for ū_k. A PolyHamiltonian maps canonical monomials to complex
coefficients; every stored monomial conserves momentum, Σ σ_i k_i = 0.

Brackets are oriented so that {F, H} is the derivative of F along the flow
of H:

    {F, H} = i Σ_k ( ∂_{u_k}H ∂_{ū_k}F - ∂_{ū_k}H ∂_{u_k}F )
    u̇_k    = -i ∂_{ū_k}H

Usage:
    from wwbirkhoff.poly_hamiltonian import Monomial, PolyHamiltonian, poisson_bracket

    F = PolyHamiltonian({Monomial.of((1, 1), (1, 1), (2, -1)): 1.0})
    G = poisson_bracket(F, H2)
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import (
    Callable,
    DefaultDict,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Tuple,
)

import numpy as np

from .constants import MINUS, PLUS, TOLERANCES
from .resonance import SignedTuple, is_exact_zero
from .spectral_core import (
    ComplexPair,
    Dispersion,
    SpectralField,
    TruncationError,
    mode_position,
)

logger = logging.getLogger(__name__)

__all__ = [
    "HamiltonianError",
    "MomentumError",
    "ResonantDivisorError",
    "SerializationError",
    "SignedMode",
    "Monomial",
    "PolyHamiltonian",
    "VectorFieldSpec",
    "evaluate",
    "evaluate_array",
    "gradient",
    "differentiate",
    "poisson_bracket",
    "hamiltonian_vector_field",
    "project_kernel",
    "solve_cohomological",
    "dumps",
    "loads",
]


class HamiltonianError(ValueError):
    """Base exception for polynomial Hamiltonian errors."""
    pass


class MomentumError(HamiltonianError):
    """A monomial with nonzero momentum was admitted into a Hamiltonian."""
    pass


class ResonantDivisorError(HamiltonianError):
    """The cohomological equation met an exactly resonant monomial."""
    pass


class SerializationError(HamiltonianError):
    """Malformed line in a Hamiltonian dump."""
    pass


# =============================================================================
# MONOMIALS
# =============================================================================

class SignedMode(NamedTuple):
    """u_k (sigma = +1) or ū_k (sigma = -1); orders by (k, sigma)."""
    k: int
    sigma: int


@dataclass(frozen=True)
class Monomial:
    """Canonically sorted multiset of signed modes."""
    factors: Tuple[SignedMode, ...]

    def __post_init__(self):
        factors = tuple(sorted(SignedMode(int(k), int(s)) for k, s in self.factors))
        for f in factors:
            if f.k == 0:
                raise HamiltonianError("mode 0 cannot appear in a monomial")
            if f.sigma not in (PLUS, MINUS):
                raise HamiltonianError(f"sign must be +1/-1, got {f.sigma}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *pairs: Tuple[int, int]) -> "Monomial":
        """Monomial.of((k1, σ1), (k2, σ2), ...)."""
        return cls(tuple(SignedMode(k, s) for k, s in pairs))

    @classmethod
    def action(cls, *modes: int) -> "Monomial":
        """Π |u_k|² over the given modes."""
        pairs: List[Tuple[int, int]] = []
        for k in modes:
            pairs.extend(((k, PLUS), (k, MINUS)))
        return cls.of(*pairs)

    @property
    def degree(self) -> int:
        return len(self.factors)

    @property
    def momentum(self) -> int:
        return sum(f.sigma * f.k for f in self.factors)

    @property
    def max_mode(self) -> int:
        return max((abs(f.k) for f in self.factors), default=0)

    def phase(self, dispersion: Optional[Dispersion] = None) -> float:
        """Σ σ_i ω(k_i), recomputed on every call."""
        d = dispersion or Dispersion()
        return sum(f.sigma * d.omega(f.k) for f in self.factors)

    def signed_tuple(self) -> SignedTuple:
        return SignedTuple(tuple(f.sigma for f in self.factors), tuple(f.k for f in self.factors))

    def conjugate(self) -> "Monomial":
        """Flip every u_k <-> ū_k."""
        return Monomial(tuple(SignedMode(f.k, -f.sigma) for f in self.factors))

    def multiplicity(self, mode: SignedMode) -> int:
        return self.factors.count(mode)

    def remove(self, mode: SignedMode) -> "Monomial":
        """Drop one copy of `mode`."""
        factors = list(self.factors)
        factors.remove(mode)
        return Monomial(tuple(factors))

    def merge(self, other: "Monomial") -> "Monomial":
        return Monomial(self.factors + other.factors)

    def is_action(self) -> bool:
        """True if the monomial is a product of |u_k|² factors."""
        plus = sorted(f.k for f in self.factors if f.sigma == PLUS)
        minus = sorted(f.k for f in self.factors if f.sigma == MINUS)
        return plus == minus

    def tokens(self) -> List[str]:
        out: List[str] = []
        for f in self.factors:
            out.extend(("+" if f.sigma == PLUS else "-", str(f.k)))
        return out

    def __str__(self) -> str:
        return " ".join(f"{'u' if f.sigma == PLUS else 'ū'}{f.k}" for f in self.factors)


# =============================================================================
# HAMILTONIANS
# =============================================================================

@dataclass(frozen=True, eq=False)
class PolyHamiltonian:
    """
    Sparse polynomial Hamiltonian {Monomial: coefficient}.

    Raises:
        MomentumError: If a monomial has nonzero momentum
    """
    terms: Mapping[Monomial, complex]

    def __post_init__(self):
        clean: Dict[Monomial, complex] = {}
        for m, c in dict(self.terms).items():
            if m.momentum != 0:
                raise MomentumError(f"monomial {m} has momentum {m.momentum}")
            c = complex(c)
            if c != 0:
                clean[m] = c
        object.__setattr__(self, "terms", MappingProxyType(clean))

    @classmethod
    def empty(cls) -> "PolyHamiltonian":
        return cls({})

    @classmethod
    def collect(cls, acc: Mapping[Monomial, complex], prune: Optional[float] = None) -> "PolyHamiltonian":
        """Build from an accumulator, dropping coefficients below the pruning threshold."""
        threshold = TOLERANCES["prune"] if prune is None else prune
        return cls({m: c for m, c in acc.items() if abs(c) >= threshold})

    # ---- mapping protocol ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.terms)

    def __contains__(self, m: object) -> bool:
        return m in self.terms

    def items(self):
        return self.terms.items()

    def coefficient(self, m: Monomial) -> complex:
        return self.terms.get(m, 0j)

    # ---- structure ----------------------------------------------------------

    @property
    def degrees(self) -> FrozenSet[int]:
        return frozenset(m.degree for m in self.terms)

    @property
    def max_mode(self) -> int:
        return max((m.max_mode for m in self.terms), default=0)

    def degree_part(self, degree: int) -> "PolyHamiltonian":
        return PolyHamiltonian({m: c for m, c in self.terms.items() if m.degree == degree})

    def restrict(self, keep: Callable[[Monomial], bool]) -> "PolyHamiltonian":
        return PolyHamiltonian({m: c for m, c in self.terms.items() if keep(m)})

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def conjugate(self) -> "PolyHamiltonian":
        """The Hamiltonian conj(H(u)), i.e. coefficient(m) -> conj(coefficient(flip m))."""
        return PolyHamiltonian({m.conjugate(): c.conjugate() for m, c in self.terms.items()})

    def is_real(self, tol: float = 1e-12) -> bool:
        """Reality: coefficient(flip m) = conj(coefficient(m)) for every m."""
        scale = max(1.0, self.max_abs_coefficient())
        for m, c in self.terms.items():
            if abs(self.coefficient(m.conjugate()) - c.conjugate()) > tol * scale:
                return False
        return True

    def max_difference(self, other: "PolyHamiltonian") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.coefficient(m) - other.coefficient(m)) for m in keys), default=0.0)

    # ---- arithmetic ---------------------------------------------------------

    def __add__(self, other: "PolyHamiltonian") -> "PolyHamiltonian":
        acc: DefaultDict[Monomial, complex] = defaultdict(complex, self.terms)
        for m, c in other.terms.items():
            acc[m] += c
        return PolyHamiltonian.collect(acc)

    def __neg__(self) -> "PolyHamiltonian":
        return self.scale(-1.0)

    def __sub__(self, other: "PolyHamiltonian") -> "PolyHamiltonian":
        return self + (-other)

    def scale(self, factor: complex) -> "PolyHamiltonian":
        return PolyHamiltonian({m: factor * c for m, c in self.terms.items()})

    def __repr__(self) -> str:
        return f"PolyHamiltonian(terms={len(self.terms)}, degrees={sorted(self.degrees)})"


# =============================================================================
# EVALUATION
# =============================================================================

def _factor_values(u: np.ndarray, M: int) -> Callable[[SignedMode], complex]:
    def value(f: SignedMode) -> complex:
        a = u[mode_position(f.k, M)]
        return a if f.sigma == PLUS else a.conjugate()

    return value


def _check_truncation(H: PolyHamiltonian, M: int) -> None:
    if H.max_mode > M:
        raise TruncationError(f"Hamiltonian reaches mode {H.max_mode}, field truncated at {M}")


def evaluate_array(H: PolyHamiltonian, u: np.ndarray, M: int) -> complex:
    """Evaluate H on a raw amplitude array of a field truncated at M."""
    _check_truncation(H, M)
    value = _factor_values(u, M)
    total = 0j
    for m, c in H.terms.items():
        prod = c
        for f in m.factors:
            prod *= value(f)
        total += prod
    return total


def evaluate(H: PolyHamiltonian, c: ComplexPair) -> complex:
    """Σ coefficient × Π u_{k_i}^{σ_i}."""
    return evaluate_array(H, c.u.amplitudes, c.truncation)


def differentiate(H: PolyHamiltonian, sigma: int, k: int) -> Dict[Monomial, complex]:
    """∂H/∂u_k^σ as a sparse polynomial (momentum no longer zero)."""
    target = SignedMode(k, sigma)
    out: DefaultDict[Monomial, complex] = defaultdict(complex)
    for m, c in H.terms.items():
        mult = m.multiplicity(target)
        if mult:
            out[m.remove(target)] += mult * c
    return dict(out)


def gradient(H: PolyHamiltonian, c: ComplexPair, sigma: int, k: int) -> complex:
    """Formal ∂H/∂u_k^σ at c, with u_k and ū_k independent."""
    M = c.truncation
    _check_truncation(H, M)
    mode_position(k, M)
    value = _factor_values(c.u.amplitudes, M)
    total = 0j
    for m, coef in differentiate(H, sigma, k).items():
        prod = coef
        for f in m.factors:
            prod *= value(f)
        total += prod
    return total


# =============================================================================
# BRACKETS
# =============================================================================

def _index_by_factor(H: PolyHamiltonian) -> Dict[SignedMode, List[Tuple[Monomial, complex, int]]]:
    index: DefaultDict[SignedMode, List[Tuple[Monomial, complex, int]]] = defaultdict(list)
    for m, c in H.terms.items():
        for f in set(m.factors):
            index[f].append((m, c, m.factors.count(f)))
    return index


def _bracket_full(F: PolyHamiltonian, H: PolyHamiltonian) -> DefaultDict[Monomial, complex]:
    index = _index_by_factor(H)
    acc: DefaultDict[Monomial, complex] = defaultdict(complex)
    for fm, fc in F.terms.items():
        for ff in set(fm.factors):
            partner = SignedMode(ff.k, -ff.sigma)
            entries = index.get(partner)
            if not entries:
                continue
            mult_f = fm.factors.count(ff)
            rest_f = fm.remove(ff)
            # i σ with σ the sign of the factor H is differentiated in
            factor = 1j * partner.sigma * mult_f * fc
            for hm, hc, mult_h in entries:
                acc[hm.remove(partner).merge(rest_f)] += factor * mult_h * hc
    return acc


def _sub_multisets(factors: Tuple[SignedMode, ...], size: int) -> Iterable[Tuple[Tuple[SignedMode, ...], Tuple[SignedMode, ...]]]:
    seen = set()
    for idx in combinations(range(len(factors)), size):
        part = tuple(factors[i] for i in idx)
        if part in seen:
            continue
        seen.add(part)
        rest = tuple(f for i, f in enumerate(factors) if i not in idx)
        yield part, rest


def _bracket_on_support(
    F: PolyHamiltonian,
    H: PolyHamiltonian,
    support: Iterable[Monomial],
) -> DefaultDict[Monomial, complex]:
    acc: DefaultDict[Monomial, complex] = defaultdict(complex)
    pairs = [(dh, df) for dh in H.degrees for df in F.degrees]
    for target in support:
        total = 0j
        for dh, df in pairs:
            if dh + df - 2 != target.degree or dh < 1 or df < 1:
                continue
            for part, rest in _sub_multisets(target.factors, dh - 1):
                moment = sum(f.sigma * f.k for f in part)
                for sigma in (PLUS, MINUS):
                    k = -sigma * moment
                    if k == 0:
                        continue
                    h_mode = SignedMode(k, sigma)
                    f_mode = SignedMode(k, -sigma)
                    hm = Monomial(part + (h_mode,))
                    hc = H.coefficient(hm)
                    if hc == 0:
                        continue
                    fm = Monomial(rest + (f_mode,))
                    fc = F.coefficient(fm)
                    if fc == 0:
                        continue
                    total += 1j * sigma * hm.multiplicity(h_mode) * fm.multiplicity(f_mode) * hc * fc
        if total != 0:
            acc[target] += total
    return acc


def poisson_bracket(
    F: PolyHamiltonian,
    H: PolyHamiltonian,
    support: Optional[Iterable[Monomial]] = None,
) -> PolyHamiltonian:
    """
    {F, H} = i Σ_k (∂_{u_k}H ∂_{ū_k}F - ∂_{ū_k}H ∂_{u_k}F).

    Args:
        F, H: Momentum-conserving Hamiltonians
        support: If given, only these output monomials are computed; the
            result equals the full bracket restricted to them.
    """
    if support is None:
        acc = _bracket_full(F, H)
    else:
        acc = _bracket_on_support(F, H, support)
    return PolyHamiltonian.collect(acc)


# =============================================================================
# VECTOR FIELDS
# =============================================================================

@dataclass(frozen=True, eq=False)
class VectorFieldSpec:
    """
    Components of a Hamiltonian vector field; the component on u_k^σ is the
    polynomial -iσ ∂_{u_k^{-σ}} H.
    """
    components: Mapping[SignedMode, Mapping[Monomial, complex]]

    def component(self, sigma: int, k: int) -> Mapping[Monomial, complex]:
        return self.components.get(SignedMode(k, sigma), {})

    def evaluate(self, c: ComplexPair) -> SpectralField:
        """u̇ at c, as a field with the truncation of c."""
        M = c.truncation
        value = _factor_values(c.u.amplitudes, M)
        out = np.zeros(2 * M, dtype=complex)
        for mode, poly in self.components.items():
            if mode.sigma != PLUS or abs(mode.k) > M:
                continue
            total = 0j
            for m, coef in poly.items():
                prod = coef
                for f in m.factors:
                    if abs(f.k) > M:
                        raise TruncationError(f"vector field reaches mode {f.k}")
                    prod *= value(f)
                total += prod
            out[mode_position(mode.k, M)] = total
        return SpectralField(M, out)

    def is_real_to_real(self, tol: float = 1e-12) -> bool:
        """Component on ū_k is the conjugate flip of the component on u_k."""
        for mode, poly in self.components.items():
            if mode.sigma != PLUS:
                continue
            partner = self.components.get(SignedMode(mode.k, MINUS), {})
            for m, c in poly.items():
                if abs(partner.get(m.conjugate(), 0j) - c.conjugate()) > tol * max(1.0, abs(c)):
                    return False
        return True


def hamiltonian_vector_field(H: PolyHamiltonian) -> VectorFieldSpec:
    """X_H with u̇_k = -i ∂_{ū_k}H and its conjugate component."""
    modes = {f.k for m in H.terms for f in m.factors}
    components: Dict[SignedMode, Mapping[Monomial, complex]] = {}
    for k in sorted(modes):
        for sigma in (PLUS, MINUS):
            partial = differentiate(H, -sigma, k)
            if partial:
                components[SignedMode(k, sigma)] = MappingProxyType(
                    {m: -1j * sigma * c for m, c in partial.items()}
                )
    return VectorFieldSpec(MappingProxyType(components))


# =============================================================================
# NORMAL FORM PRIMITIVES
# =============================================================================

def project_kernel(H: PolyHamiltonian) -> PolyHamiltonian:
    """Keep exactly the monomials whose phase Σ σ_i ω(k_i) is zero (exact test)."""
    return H.restrict(lambda m: is_exact_zero(m.signed_tuple()))


def solve_cohomological(H3: PolyHamiltonian, dispersion: Optional[Dispersion] = None) -> PolyHamiltonian:
    """
    F3 with {F3, H2} + H3 = 0, i.e. coefficient(m) = H3(m) / (i Σ σ_i ω(k_i)).

    Raises:
        ResonantDivisorError: If a monomial of H3 is exactly resonant
    """
    d = dispersion or Dispersion()
    out: Dict[Monomial, complex] = {}
    for m, c in H3.terms.items():
        if is_exact_zero(m.signed_tuple()):
            raise ResonantDivisorError(f"resonant monomial {m} in the cohomological equation")
        out[m] = c / (1j * m.phase(d))
    return PolyHamiltonian(out)


# =============================================================================
# SERIALIZATION
# =============================================================================

def dumps(H: PolyHamiltonian) -> str:
    """One term per line: `deg σ1 k1 σ2 k2 ... re im`."""
    lines = []
    for m in sorted(H.terms, key=lambda m: (m.degree, m.factors)):
        c = H.terms[m]
        lines.append(" ".join([str(m.degree)] + m.tokens() + [repr(c.real), repr(c.imag)]))
    return "\n".join(lines) + ("\n" if lines else "")


def loads(text: str) -> PolyHamiltonian:
    """
    Parse the line format written by dumps.

    Raises:
        SerializationError: On malformed lines
    """
    terms: Dict[Monomial, complex] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            degree = int(parts[0])
            if len(parts) != 2 * degree + 3:
                raise SerializationError(f"line {lineno}: expected {2 * degree + 3} fields")
            pairs = []
            for i in range(degree):
                sign, k = parts[1 + 2 * i], int(parts[2 + 2 * i])
                if sign not in ("+", "-"):
                    raise SerializationError(f"line {lineno}: bad sign {sign!r}")
                pairs.append((k, PLUS if sign == "+" else MINUS))
            coef = complex(float(parts[-2]), float(parts[-1]))
        except (IndexError, ValueError) as e:
            if isinstance(e, SerializationError):
                raise
            raise SerializationError(f"line {lineno}: {e}") from e
        terms[Monomial.of(*pairs)] = terms.get(Monomial.of(*pairs), 0j) + coef
    return PolyHamiltonian(terms)
