"""
Water-Waves Expansion
=====================

Quartic-order expansion of the infinite-depth water-waves Hamiltonian

    H = ½ ∫ ψ G(η) ψ dx + ½ ∫ η² dx,   G(η) = G₀ + G₁(η) + G₂(η) + ...

with the Dirichlet-Neumann terms

    G₀ = |D|
    G₁(η) = -∂_x η ∂_x - |D| η |D|
    G₂(η) = -½ (D² η² |D| + |D| η² D² - 2 |D| η |D| η |D|)

(D² has symbol k²). The module provides two views of the same object:

- a PseudoSpectralGrid that evaluates energies and L² gradients of
  H² + H³ + H⁴ on an alias-free physical grid (this drives the flow), and
- build_hamiltonian(), which pushes H², H³, H⁴ to sparse polynomials in the
  complex variables u_k = (|k|^{-1/4} η_k + i |k|^{1/4} ψ_k) / √2.

The second half probes the quadratic functionals of the paralinearised
system (V, a and the quadratic vector field F₂) on single-mode fields and
reads off their Fourier coefficients.

Usage:
    from wwbirkhoff.ww_expansion import build_hamiltonian, extract_bilinear

    H3 = build_hamiltonian(8, 3)
    extract_bilinear("V1", 4, +1)          # ≈ 2.0
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from itertools import combinations_with_replacement, permutations
from types import MappingProxyType
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import MINUS, PARAPRODUCT_DELTA, PLUS, SIGNS, SQRT2, SQRT_2PI
from .poly_hamiltonian import Monomial, PolyHamiltonian, SignedMode
from .spectral_core import (
    Dispersion,
    RealPair,
    SpectralField,
    TruncationError,
    complex_to_real_arrays,
    dealiased_grid_size,
    mode_array,
    mode_position,
    wavenumbers,
)

logger = logging.getLogger(__name__)

__all__ = [
    "ExpansionError",
    "UnknownFunctionalError",
    "DNOrder",
    "PseudoSpectralGrid",
    "dn_apply",
    "rhs_quadratic",
    "quadratic_energy",
    "cubic_energy",
    "quartic_energy",
    "hamiltonian_coefficient",
    "quartic_coefficient",
    "build_hamiltonian",
    "paraproduct",
    "FUNCTIONALS",
    "extract_bilinear",
    "closed_form",
    "CoefficientTable",
    "TABLE_LABELS",
    "coefficient_table",
]


class ExpansionError(ValueError):
    """Base exception for the water-waves expansion."""
    pass


class UnknownFunctionalError(ExpansionError):
    """Raised when a probe tag names no known functional."""
    pass


class DNOrder(IntEnum):
    """Homogeneity order of the Dirichlet-Neumann term G_j."""
    G0 = 0
    G1 = 1
    G2 = 2


# =============================================================================
# PSEUDO-SPECTRAL GRID
# =============================================================================

class PseudoSpectralGrid:
    """
    Physical grid for fields truncated at M.

    Amplitude arrays use the mode order -M..-1, 1..M of SpectralField. The
    default size 6M + 2 keeps every product of up to three fields exact
    after projection to |k| <= M, and every quartic integrand exact under
    the trapezoid rule.
    """

    def __init__(self, M: int, N: Optional[int] = None):
        if M < 1:
            raise ExpansionError(f"truncation must be >= 1, got {M}")
        self.M = M
        self.N = N if N is not None else dealiased_grid_size(M, 3)
        if self.N < 2 * M + 1:
            raise TruncationError(f"grid of {self.N} points cannot hold M={M}")
        self.k = wavenumbers(self.N).astype(float)
        self.abs_k = np.abs(self.k)
        self._slots = mode_array(M) % self.N

    # ---- transforms ---------------------------------------------------------

    def lift(self, amplitudes: np.ndarray) -> np.ndarray:
        """Grid values of a field given by its amplitude array."""
        c = np.zeros(self.N, dtype=complex)
        c[self._slots] = amplitudes
        return np.fft.ifft(c) * (self.N / SQRT_2PI)

    def lift_real(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.lift(amplitudes).real

    def project(self, values: np.ndarray) -> np.ndarray:
        """Amplitudes 0 < |k| <= M of grid values."""
        return np.fft.fft(values)[self._slots] * (SQRT_2PI / self.N)

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        """All N normalised Fourier coefficients, FFT order."""
        return np.fft.fft(values) * (SQRT_2PI / self.N)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.real(np.sum(values)) * (2.0 * math.pi / self.N))

    # ---- multipliers --------------------------------------------------------

    def multiply(self, values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
        out = np.fft.ifft(np.fft.fft(values) * symbol)
        return out.real if np.isrealobj(values) else out

    def absD(self, values: np.ndarray, power: float = 1.0) -> np.ndarray:
        """|D|^power; the zero mode is sent to zero."""
        symbol = np.zeros(self.N)
        nz = self.abs_k > 0
        symbol[nz] = self.abs_k[nz] ** power
        return self.multiply(values, symbol)

    def dx(self, values: np.ndarray) -> np.ndarray:
        return self.multiply(values, 1j * self.k)

    def D2(self, values: np.ndarray) -> np.ndarray:
        return self.multiply(values, self.k ** 2)

    # ---- Dirichlet-Neumann terms --------------------------------------------

    def G1(self, eta: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """G₁(η)ψ = -∂_x(η ψ_x) - |D|(η |D|ψ)."""
        return -self.dx(eta * self.dx(psi)) - self.absD(eta * self.absD(psi))

    def G2(self, eta: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """G₂(η)ψ on grid values."""
        dpsi = self.absD(psi)
        inner = self.absD(eta * self.absD(eta * dpsi))
        return -0.5 * (self.D2(eta * eta * dpsi) + self.absD(eta * eta * self.D2(psi)) - 2.0 * inner)

    # ---- energies and gradients ---------------------------------------------

    def energy(self, eta_amp: np.ndarray, psi_amp: np.ndarray, degree: int = 4) -> float:
        """H² + ... + H^degree of a real pair given by amplitude arrays."""
        eta = self.lift_real(eta_amp)
        psi = self.lift_real(psi_amp)
        dpsi = self.absD(psi)
        total = 0.5 * self.integrate(psi * dpsi) + 0.5 * self.integrate(eta * eta)
        if degree >= 3:
            psi_x = self.dx(psi)
            total += 0.5 * self.integrate(eta * (psi_x * psi_x - dpsi * dpsi))
        if degree >= 4:
            w = eta * dpsi
            total += -0.5 * self.integrate(eta * eta * self.D2(psi) * dpsi) + 0.5 * self.integrate(w * self.absD(w))
        return total

    def gradients(
        self,
        eta_amp: np.ndarray,
        psi_amp: np.ndarray,
        degree: int = 4,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        L² gradients (∇_η H, ∇_ψ H) of H² + ... + H^degree.

        Returns:
            Amplitude arrays truncated at M
        """
        eta = self.lift_real(eta_amp)
        psi = self.lift_real(psi_amp)
        dpsi = self.absD(psi)

        grad_eta = eta.copy()
        grad_psi = dpsi.copy()
        if degree >= 3:
            psi_x = self.dx(psi)
            grad_eta = grad_eta + 0.5 * (psi_x * psi_x - dpsi * dpsi)
            grad_psi = grad_psi - self.dx(eta * psi_x) - self.absD(eta * dpsi)
        if degree >= 4:
            w = eta * dpsi
            grad_eta = grad_eta - eta * self.D2(psi) * dpsi + dpsi * self.absD(w)
            grad_psi = grad_psi + self.G2(eta, psi)
        return self.project(grad_eta), self.project(grad_psi)


# =============================================================================
# REAL-VARIABLE OPERATIONS
# =============================================================================

def _check_pair(eta: SpectralField, psi: SpectralField) -> int:
    if eta.truncation != psi.truncation:
        raise TruncationError(f"truncations differ: {eta.truncation} vs {psi.truncation}")
    return eta.truncation


def dn_apply(
    order: DNOrder,
    eta: SpectralField,
    psi: SpectralField,
    out_truncation: Optional[int] = None,
) -> SpectralField:
    """
    Apply the Dirichlet-Neumann term G_order(η) to ψ.

    Args:
        order: G0, G1 or G2
        eta, psi: Real fields with a common truncation M
        out_truncation: Truncation of the result (defaults to M)

    Returns:
        Real field; modes beyond out_truncation are discarded

    Raises:
        TruncationError: If the truncations differ
    """
    M = _check_pair(eta, psi)
    M_out = out_truncation if out_truncation is not None else M
    grid = PseudoSpectralGrid(max(M, M_out))
    e = grid.lift_real(eta.with_truncation(grid.M).amplitudes)
    p = grid.lift_real(psi.with_truncation(grid.M).amplitudes)
    order = DNOrder(order)
    if order == DNOrder.G0:
        values = grid.absD(p)
    elif order == DNOrder.G1:
        values = grid.G1(e, p)
    else:
        values = grid.G2(e, p)
    return SpectralField(grid.M, grid.project(values), True).with_truncation(M_out)


def rhs_quadratic(p: RealPair) -> RealPair:
    """
    Water-waves right-hand side through quadratic order:

        η̇ = |D|ψ - ∂_x(η ψ_x) - |D|(η |D|ψ)
        ψ̇ = -η - ½ ψ_x² + ½ (|D|ψ)²
    """
    grid = PseudoSpectralGrid(p.truncation)
    grad_eta, grad_psi = grid.gradients(p.eta.amplitudes, p.psi.amplitudes, degree=3)
    M = p.truncation
    return RealPair(SpectralField(M, grad_psi, True), SpectralField(M, -grad_eta, True))


def quadratic_energy(p: RealPair) -> float:
    """½∫ψ|D|ψ + ½∫η²."""
    return PseudoSpectralGrid(p.truncation).energy(p.eta.amplitudes, p.psi.amplitudes, degree=2)


def cubic_energy(p: RealPair, form: str = "reduced") -> float:
    """
    Cubic energy H³.

    Args:
        p: Real pair
        form: "reduced" for ½∫η(ψ_x² - (|D|ψ)²), "dirichlet" for ½∫ψ G₁(η)ψ
    """
    grid = PseudoSpectralGrid(p.truncation)
    eta = grid.lift_real(p.eta.amplitudes)
    psi = grid.lift_real(p.psi.amplitudes)
    if form == "reduced":
        psi_x = grid.dx(psi)
        dpsi = grid.absD(psi)
        return 0.5 * grid.integrate(eta * (psi_x * psi_x - dpsi * dpsi))
    if form == "dirichlet":
        return 0.5 * grid.integrate(psi * grid.G1(eta, psi))
    raise ExpansionError(f"unknown cubic form {form!r}")


def quartic_energy(p: RealPair) -> float:
    """½∫ψ G₂(η)ψ."""
    grid = PseudoSpectralGrid(p.truncation)
    eta = grid.lift_real(p.eta.amplitudes)
    psi = grid.lift_real(p.psi.amplitudes)
    return 0.5 * grid.integrate(psi * grid.G2(eta, psi))


# =============================================================================
# COMPLEX-VARIABLE HAMILTONIAN
# =============================================================================

# Fields η and ψ in terms of a factor u_j^σ feeding the slot wavenumber k = σj
_ETA = "eta"
_PSI = "psi"


def _field_weight(field: str, factor: SignedMode) -> complex:
    k = abs(factor.k)
    if field == _ETA:
        return k ** 0.25 / SQRT2
    return -1j * factor.sigma * k ** -0.25 / SQRT2


def _cubic_kernel(k1: int, k2: int, k3: int) -> float:
    # ½∫η(ψ_x² - (|D|ψ)²), slots (η, ψ, ψ)
    return -0.5 / SQRT_2PI * (k2 * k3 + abs(k2) * abs(k3))


def _quartic_kernel(k1: int, k2: int, k3: int, k4: int) -> float:
    # ½∫ψ G₂(η)ψ, slots (ψ, η, η, ψ)
    return -0.25 / (2.0 * math.pi) * (
        k1 * k1 * abs(k4) + abs(k1) * k4 * k4 - 2.0 * abs(k1) * abs(k4) * abs(k3 + k4)
    )


_KERNELS: Mapping[int, Tuple[Tuple[str, ...], Callable[..., float]]] = MappingProxyType({
    3: ((_ETA, _PSI, _PSI), _cubic_kernel),
    4: ((_PSI, _ETA, _ETA, _PSI), _quartic_kernel),
})


def hamiltonian_coefficient(monomial: Monomial, dispersion: Optional[Dispersion] = None) -> complex:
    """
    Coefficient of a monomial in H² + H³ + H⁴.

    Every distinct assignment of the monomial's factors to the ordered field
    slots of the real integral contributes kernel × Π weights.
    """
    degree = monomial.degree
    if monomial.momentum != 0:
        return 0j
    if degree == 2:
        if not monomial.is_action():
            return 0j
        return complex((dispersion or Dispersion()).omega(monomial.factors[0].k))
    if degree not in _KERNELS:
        raise ExpansionError(f"no expansion term of degree {degree}")
    fields, kernel = _KERNELS[degree]
    total = 0j
    for arrangement in set(permutations(monomial.factors)):
        weight = 1.0 + 0j
        for field, factor in zip(fields, arrangement):
            weight *= _field_weight(field, factor)
        total += kernel(*(f.sigma * f.k for f in arrangement)) * weight
    return total


def quartic_coefficient(monomial: Monomial) -> complex:
    """Closed-form coefficient of a degree-4 monomial in H⁴."""
    if monomial.degree != 4:
        raise ExpansionError(f"quartic_coefficient needs degree 4, got {monomial.degree}")
    return hamiltonian_coefficient(monomial)


def _signed_modes(M: int) -> List[SignedMode]:
    return sorted(SignedMode(int(k), s) for k in mode_array(M) for s in SIGNS)


def _canonical_monomials(M: int, degree: int) -> Iterable[Monomial]:
    """Momentum-conserving monomials with all modes in 0 < |k| <= M, once each."""
    modes = _signed_modes(M)
    for head in combinations_with_replacement(modes, degree - 1):
        moment = sum(f.sigma * f.k for f in head)
        for sigma in SIGNS:
            k = -sigma * moment
            if k == 0 or abs(k) > M:
                continue
            last = SignedMode(k, sigma)
            if last < head[-1]:
                continue
            yield Monomial(head + (last,))


def build_hamiltonian(
    M: int,
    degree: int,
    support: Optional[Iterable[Sequence[Tuple[int, int]]]] = None,
) -> PolyHamiltonian:
    """
    Homogeneous part of the water-waves Hamiltonian in complex variables.

    Args:
        M: Truncation (every mode of every monomial satisfies |k| <= M)
        degree: 2, 3 or 4
        support: Optional iterable of factor lists; only these monomials are
            built (used for H⁴ on the resonant set)

    Returns:
        Real, momentum-conserving PolyHamiltonian

    Raises:
        ExpansionError: On a bad degree/truncation or a non-real result
    """
    if M < 2:
        raise ExpansionError(f"truncation must be >= 2, got {M}")
    if degree not in (2, 3, 4):
        raise ExpansionError(f"degree must be 2, 3 or 4, got {degree}")

    if degree == 2:
        d = Dispersion()
        H = PolyHamiltonian({Monomial.action(int(k)): d.omega(int(k)) for k in mode_array(M)})
        logger.info("built H2 with %d terms (M=%d)", len(H), M)
        return H

    if support is None:
        monomials: Iterable[Monomial] = _canonical_monomials(M, degree)
    else:
        monomials = (Monomial.of(*factors) for factors in support)

    acc: Dict[Monomial, complex] = {}
    for m in monomials:
        if m.degree != degree or m.max_mode > M:
            continue
        acc[m] = hamiltonian_coefficient(m)
    H = PolyHamiltonian.collect(acc)
    if not H.is_real():
        raise ExpansionError(f"H{degree} at M={M} is not real")
    logger.info("built H%d with %d terms (M=%d)", degree, len(H), M)
    return H


# =============================================================================
# PARAPRODUCT
# =============================================================================

def paraproduct(a: np.ndarray, b: np.ndarray, delta: float = PARAPRODUCT_DELTA) -> np.ndarray:
    """
    Discrete Bony-Weyl paraproduct T_a b on grid values.

    (T_a b)_k = (2π)^{-1/2} Σ_j χ(k - j, (k + j)/2) â_{k-j} b̂_j with the sharp
    admissible cutoff χ(ξ', ξ) = 1 iff |ξ'| <= δ √(1 + ξ²).
    """
    N = a.shape[0]
    k = wavenumbers(N)
    A = np.fft.fft(a) * (SQRT_2PI / N)
    B = np.fft.fft(b) * (SQRT_2PI / N)
    out_k = k[:, None]
    in_j = k[None, :]
    diff = out_k - in_j
    mean = 0.5 * (out_k + in_j)
    chi = (np.abs(diff) <= delta * np.sqrt(1.0 + mean ** 2)) & (np.abs(diff) < N // 2)
    C = (chi * A[diff % N] * B[None, :]).sum(axis=1) / SQRT_2PI
    out = np.fft.ifft(C) * (N / SQRT_2PI)
    return out.real if np.isrealobj(a) and np.isrealobj(b) else out


# =============================================================================
# PROBE FUNCTIONALS
# =============================================================================

Functional = Callable[[PseudoSpectralGrid, np.ndarray, np.ndarray], np.ndarray]


def _V1(g: PseudoSpectralGrid, eta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return g.dx(psi)


def _a1(g: PseudoSpectralGrid, eta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return -0.5 * g.absD(eta)


def _V2(g: PseudoSpectralGrid, eta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    dpsi = g.absD(psi)
    return g.dx(paraproduct(dpsi, eta)) - dpsi * g.dx(eta)


def _a2(g: PseudoSpectralGrid, eta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    deta = g.absD(eta)
    dpsi = g.absD(psi)
    psi_x = g.dx(psi)
    return (
        -0.5 * eta * g.D2(eta)
        + 0.5 * g.absD(eta * deta)
        - 0.25 * g.absD(psi_x * psi_x + dpsi * dpsi)
        + 0.5 * dpsi * g.D2(psi)
        + 0.5 * psi_x * g.dx(dpsi)
    )


def _F2(g: PseudoSpectralGrid, eta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    dpsi = g.absD(psi)
    psi_x = g.dx(psi)
    first = g.absD(paraproduct(dpsi, eta)) - g.dx(eta * psi_x) - g.absD(eta * dpsi)
    second = (
        -0.5 * psi_x * psi_x
        + 0.5 * dpsi * dpsi
        + paraproduct(g.absD(eta), eta)
        - paraproduct(dpsi, dpsi)
    )
    iF2 = g.absD(first, -0.25) / SQRT2 + 1j * g.absD(second, 0.25) / SQRT2
    return -1j * iF2


# tag -> (homogeneity, functional of the probe pair (η, ψ))
FUNCTIONALS: Mapping[str, Tuple[int, Functional]] = MappingProxyType({
    "V1": (1, _V1),
    "a1": (1, _a1),
    "V2": (2, _V2),
    "a2": (2, _a2),
    "F2": (2, _F2),
})


def _response(fn: Functional, amplitudes: Mapping[int, complex], M: int) -> np.ndarray:
    """Normalised Fourier coefficients (FFT order) of fn at the probe u."""
    grid = PseudoSpectralGrid(M, 4 * M + 2)
    u = np.zeros(2 * M, dtype=complex)
    for k, a in amplitudes.items():
        u[mode_position(k, M)] = a
    eta, psi = complex_to_real_arrays(u, M)
    values = fn(grid, grid.lift_real(eta), grid.lift_real(psi))
    return grid.coefficients(values)


def _power(t: complex, sigma: int) -> complex:
    return t if sigma == PLUS else t.conjugate()


_PAIR_PROBES = ((1.0, 1.0), (1.0, 1j), (1j, 1.0), (1j, 1j))
_PAIR_PATTERNS = ((PLUS, PLUS), (PLUS, MINUS), (MINUS, PLUS), (MINUS, MINUS))
_DIAG_PROBES = (1.0 + 0j, 1j, complex(math.cos(math.pi / 4), math.sin(math.pi / 4)))
_DIAG_PATTERNS = ((PLUS, PLUS), (PLUS, MINUS), (MINUS, MINUS))


def _pair_coefficient(fn: Functional, n1: int, s1: int, n2: int, s2: int) -> complex:
    """Coefficient of u_{n1}^{s1} u_{n2}^{s2} (n1 != n2) at output mode s1 n1 + s2 n2."""
    M = max(abs(n1), abs(n2))
    N = 4 * M + 2
    out = (s1 * n1 + s2 * n2) % N
    rhs = []
    for t1, t2 in _PAIR_PROBES:
        both = _response(fn, {n1: t1, n2: t2}, M)
        only1 = _response(fn, {n1: t1}, M)
        only2 = _response(fn, {n2: t2}, M)
        rhs.append((both - only1 - only2)[out])
    matrix = np.array([
        [_power(complex(t1), p1) * _power(complex(t2), p2) for p1, p2 in _PAIR_PATTERNS]
        for t1, t2 in _PAIR_PROBES
    ])
    solution = np.linalg.solve(matrix, np.array(rhs))
    return complex(solution[_PAIR_PATTERNS.index((s1, s2))])


def _diagonal_coefficient(fn: Functional, n: int, s1: int, s2: int) -> complex:
    """Coefficient of u_n^{s1} u_n^{s2} at output mode (s1 + s2) n."""
    M = abs(n)
    N = 4 * M + 2
    out = ((s1 + s2) * n) % N
    pattern = (s1, s2) if (s1, s2) != (MINUS, PLUS) else (PLUS, MINUS)
    rhs = [_response(fn, {n: t}, M)[out] for t in _DIAG_PROBES]
    matrix = np.array([
        [_power(t, p1) * _power(t, p2) for p1, p2 in _DIAG_PATTERNS]
        for t in _DIAG_PROBES
    ])
    solution = np.linalg.solve(matrix, np.array(rhs))
    return complex(solution[_DIAG_PATTERNS.index(pattern)])


def extract_bilinear(
    tag: str,
    n1: int,
    sigma1: int,
    n2: Optional[int] = None,
    sigma2: Optional[int] = None,
) -> complex:
    """
    Fourier coefficient of a probe functional.

    Linear functionals f = (2π)^{-1/2} Σ m^σ_n u_n^σ e^{iσnx} return m^{σ1}_{n1}.
    Quadratic functionals f = (2π)^{-1} Σ m^{σσ'}_{n,n'} u_n^σ u_{n'}^{σ'} e^{i(σn+σ'n')x}
    return m^{σ1σ2}_{n1,n2}; for equal signs and n1 != n2 only the symmetric
    sum is observable and half of it is returned. (-, +) is read as the
    (+, -) coefficient of (n2, n1).

    Args:
        tag: One of FUNCTIONALS
        n1, sigma1: First mode and sign
        n2, sigma2: Second mode and sign (quadratic functionals only)

    Raises:
        UnknownFunctionalError: If the tag is unknown
        ExpansionError: On arguments that do not fit the functional
    """
    if tag not in FUNCTIONALS:
        raise UnknownFunctionalError(f"unknown functional {tag!r}; expected one of {sorted(FUNCTIONALS)}")
    degree, fn = FUNCTIONALS[tag]
    if n1 == 0 or sigma1 not in SIGNS:
        raise ExpansionError(f"bad first slot ({n1}, {sigma1})")

    if degree == 1:
        if n2 is not None:
            raise ExpansionError(f"{tag} is linear; no second mode")
        M = abs(n1)
        return complex(_response(fn, {n1: 1.0}, M)[(sigma1 * n1) % (4 * M + 2)])

    if n2 is None or sigma2 is None or n2 == 0 or sigma2 not in SIGNS:
        raise ExpansionError(f"{tag} is quadratic; a nonzero second mode and sign are required")
    if (sigma1, sigma2) == (MINUS, PLUS):
        n1, n2 = n2, n1
        sigma1, sigma2 = PLUS, MINUS

    if n1 == n2:
        raw = _diagonal_coefficient(fn, n1, sigma1, sigma2)
    else:
        raw = _pair_coefficient(fn, n1, sigma1, n2, sigma2)
        if sigma1 == sigma2:
            raw *= 0.5
    return SQRT_2PI * raw


# =============================================================================
# COEFFICIENT TABLES
# =============================================================================

CoefficientKey = Tuple[Tuple[int, ...], Tuple[int, ...]]


def closed_form(label: str, signs: Tuple[int, ...], modes: Tuple[int, ...]) -> Optional[complex]:
    """
    Known closed-form value of a tabulated coefficient, None if none is known.
    """
    n = abs(modes[0])
    if label in ("V1", "a1"):
        if label == "V1":
            return complex(modes[0] * n ** -0.25 / SQRT2)
        return complex(-(n ** 1.25) / (2.0 * SQRT2))
    if signs != (PLUS, MINUS):
        return None
    n1, n2 = modes
    if label == "F2" and n1 == -n2:
        return complex(2.0 ** -0.25 * n ** 1.75)
    if label == "V2diag":
        if n1 == n2:
            return complex(n1 * n)
        if n1 == -n2:
            return 0j
    if label == "a2diag" and n1 == n2:
        return complex(0.5 * n ** 2.5)
    return None


# table label -> (probe tag, entry keys for mode n)
_TABLES: Mapping[str, Tuple[str, Callable[[int], List[CoefficientKey]]]] = MappingProxyType({
    "V1": ("V1", lambda n: [((PLUS,), (n,)), ((MINUS,), (n,))]),
    "a1": ("a1", lambda n: [((PLUS,), (n,)), ((MINUS,), (n,))]),
    "F2": ("F2", lambda n: [((PLUS, MINUS), (n, -n)), ((PLUS, MINUS), (-n, n))]),
    "V2diag": ("V2", lambda n: [((PLUS, MINUS), (n, n)), ((PLUS, MINUS), (n, -n))]),
    "a2diag": ("a2", lambda n: [((PLUS, MINUS), (n, n))]),
})

TABLE_LABELS = tuple(_TABLES)


@dataclass(frozen=True)
class CoefficientTable:
    """Probed coefficients of one functional with their closed forms."""
    label: str
    entries: Mapping[CoefficientKey, complex]
    closed: Mapping[CoefficientKey, Optional[complex]]

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))
        object.__setattr__(self, "closed", MappingProxyType(dict(self.closed)))

    def max_error(self) -> float:
        """Largest |probed - closed| over entries with a closed form."""
        errors = [abs(v - self.closed[key]) for key, v in self.entries.items() if self.closed.get(key) is not None]
        return max(errors, default=0.0)

    def to_rows(self) -> List[List[str]]:
        rows = []
        for (signs, modes), value in self.entries.items():
            expected = self.closed.get((signs, modes))
            rows.append([
                self.label,
                "".join("+" if s == PLUS else "-" for s in signs),
                " ".join(str(k) for k in modes),
                f"{value.real:.12g}",
                f"{value.imag:.12g}",
                "" if expected is None else f"{expected.real:.12g}",
                "" if expected is None else f"{abs(value - expected):.3e}",
            ])
        return rows


def coefficient_table(label: str, M: int) -> CoefficientTable:
    """
    Probe one table for 1 <= n <= M.

    Raises:
        UnknownFunctionalError: If the label is not in TABLE_LABELS
    """
    if label not in _TABLES:
        raise UnknownFunctionalError(f"unknown table {label!r}; expected one of {list(TABLE_LABELS)}")
    tag, keys_for = _TABLES[label]
    entries: Dict[CoefficientKey, complex] = {}
    closed: Dict[CoefficientKey, Optional[complex]] = {}
    for n in range(1, M + 1):
        for signs, modes in keys_for(n):
            if len(signs) == 1:
                value = extract_bilinear(tag, modes[0], signs[0])
            else:
                value = extract_bilinear(tag, modes[0], signs[0], modes[1], signs[1])
            entries[(signs, modes)] = value
            closed[(signs, modes)] = closed_form(label, signs, modes)
    logger.debug("probed table %s up to n=%d", label, M)
    return CoefficientTable(label, entries, closed)
