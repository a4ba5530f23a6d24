"""
Spectral Core
=============

Truncated Fourier representation of zero-average 2π-periodic fields.

A SpectralField stores the amplitudes u_k for 0 < |k| <= M in the fixed
order -M, ..., -1, 1, ..., M. Physical-space work (products, quadratures)
goes through a padded FFT grid whose size is chosen so that every product
needed up to quartic order is evaluated without aliasing.

Usage:
    from wwbirkhoff.spectral_core import SpectralField, sobolev_norm

    f = SpectralField.trigonometric(8, cos={1: 1.0})   # cos x
    sobolev_norm(f, 0.0) ** 2                           # == π
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from .constants import SQRT2, SQRT_2PI

logger = logging.getLogger(__name__)

__all__ = [
    "SpectralError",
    "ZeroModeError",
    "TruncationError",
    "RealityError",
    "Multiplier",
    "mode_array",
    "mode_position",
    "SpectralField",
    "Dispersion",
    "RealPair",
    "ComplexPair",
    "abs_power",
    "sobolev_norm",
    "apply_multiplier",
    "pointwise_product",
    "to_complex",
    "from_complex",
    "real_to_complex_arrays",
    "complex_to_real_arrays",
    "dealiased_grid_size",
    "wavenumbers",
    "to_grid",
    "from_grid",
    "grid_multiplier",
    "quadrature",
]

# Vectorized over integer mode arrays
Multiplier = Callable[[np.ndarray], np.ndarray]


class SpectralError(ValueError):
    """Base exception for spectral field errors."""
    pass


class ZeroModeError(SpectralError):
    """A zero-mode amplitude was supplied."""
    pass


class TruncationError(SpectralError):
    """A mode lies outside the truncation, or truncations do not match."""
    pass


class RealityError(SpectralError):
    """A field flagged real violates u_{-k} = conj(u_k)."""
    pass


# =============================================================================
# MODE BOOKKEEPING
# =============================================================================

def mode_array(M: int) -> np.ndarray:
    """Modes -M..-1, 1..M as an integer array."""
    if M < 1:
        raise TruncationError(f"truncation must be >= 1, got {M}")
    return np.concatenate((np.arange(-M, 0), np.arange(1, M + 1)))


def mode_position(k: int, M: int) -> int:
    """Position of mode k in the amplitude array of a field truncated at M."""
    if k == 0:
        raise ZeroModeError("mode 0 is excluded (zero-average fields)")
    if abs(k) > M:
        raise TruncationError(f"mode {k} outside truncation M={M}")
    return k + M if k < 0 else k + M - 1


def abs_power(p: float) -> Multiplier:
    """The Fourier multiplier |k|^p, defined as 0 at k = 0."""

    def symbol(k: np.ndarray) -> np.ndarray:
        a = np.abs(np.asarray(k, dtype=float))
        out = np.zeros_like(a)
        nz = a > 0
        out[nz] = a[nz] ** p
        return out

    return symbol


# =============================================================================
# FIELDS
# =============================================================================

@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Truncated Fourier amplitudes of a zero-average periodic function.

    Attributes:
        truncation: M, the largest |k| carried
        amplitudes: complex array of length 2M, order -M..-1, 1..M (read-only)
        reality_flag: True if the field is real, i.e. u_{-k} = conj(u_k)
    """
    truncation: int
    amplitudes: np.ndarray
    reality_flag: bool = False

    def __post_init__(self):
        M = self.truncation
        if not isinstance(M, (int, np.integer)) or M < 1:
            raise TruncationError(f"truncation must be a positive integer, got {M!r}")
        arr = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if arr.shape != (2 * M,):
            raise TruncationError(f"expected {2 * M} amplitudes for M={M}, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise SpectralError("amplitudes must be finite")
        if self.reality_flag:
            mirror = np.conj(arr[::-1])
            scale = max(1.0, float(np.max(np.abs(arr))) if arr.size else 1.0)
            if np.max(np.abs(arr - mirror)) > 1e-12 * scale:
                raise RealityError("real field requires u_{-k} = conj(u_k)")
            arr = 0.5 * (arr + mirror)
        arr.setflags(write=False)
        object.__setattr__(self, "truncation", int(M))
        object.__setattr__(self, "amplitudes", arr)

    # ---- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, M: int, reality_flag: bool = True) -> "SpectralField":
        return cls(M, np.zeros(2 * M, dtype=complex), reality_flag)

    @classmethod
    def random(
        cls,
        M: int,
        seed: int = 0,
        decay: float = 0.0,
        reality_flag: bool = True,
    ) -> "SpectralField":
        """Gaussian amplitudes damped by e^{-decay |k|}; real fields are symmetrised."""
        rng = np.random.default_rng(seed)
        k = np.abs(mode_array(M)).astype(float)
        arr = (rng.standard_normal(2 * M) + 1j * rng.standard_normal(2 * M)) * np.exp(-decay * k)
        if reality_flag:
            arr = 0.5 * (arr + np.conj(arr[::-1]))
        return cls(M, arr, reality_flag)

    @classmethod
    def from_modes(
        cls,
        M: int,
        amplitudes: Mapping[int, complex],
        reality_flag: bool = False,
    ) -> "SpectralField":
        """
        Build a field from a sparse {mode: amplitude} map.

        Raises:
            ZeroModeError: If mode 0 is present
            TruncationError: If a mode exceeds M
        """
        arr = np.zeros(2 * M, dtype=complex)
        for k, value in amplitudes.items():
            arr[mode_position(int(k), M)] = value
        return cls(M, arr, reality_flag)

    @classmethod
    def trigonometric(
        cls,
        M: int,
        cos: Optional[Mapping[int, float]] = None,
        sin: Optional[Mapping[int, float]] = None,
    ) -> "SpectralField":
        """Real field Σ a_k cos(kx) + b_k sin(kx) for positive k."""
        arr = np.zeros(2 * M, dtype=complex)
        half = SQRT_2PI / 2.0
        for k, a in (cos or {}).items():
            arr[mode_position(k, M)] += a * half
            arr[mode_position(-k, M)] += a * half
        for k, b in (sin or {}).items():
            arr[mode_position(k, M)] += b * half / 1j
            arr[mode_position(-k, M)] -= b * half / 1j
        return cls(M, arr, True)

    # ---- accessors ----------------------------------------------------------

    @property
    def modes(self) -> np.ndarray:
        return mode_array(self.truncation)

    def amplitude(self, k: int) -> complex:
        return complex(self.amplitudes[mode_position(k, self.truncation)])

    def as_dict(self) -> Dict[int, complex]:
        return {int(k): complex(a) for k, a in zip(self.modes, self.amplitudes) if a != 0}

    def with_truncation(self, M: int) -> "SpectralField":
        """Pad with zeros or cut to a new truncation."""
        arr = np.zeros(2 * M, dtype=complex)
        keep = min(M, self.truncation)
        for k in range(1, keep + 1):
            arr[mode_position(k, M)] = self.amplitude(k)
            arr[mode_position(-k, M)] = self.amplitude(-k)
        return SpectralField(M, arr, self.reality_flag)

    def conjugate_flip(self) -> "SpectralField":
        """The field conj(u(x)), whose amplitudes are conj(u_{-k})."""
        return SpectralField(self.truncation, np.conj(self.amplitudes[::-1]), self.reality_flag)

    def is_real(self, tol: float = 1e-12) -> bool:
        diff = self.amplitudes - np.conj(self.amplitudes[::-1])
        return bool(np.max(np.abs(diff), initial=0.0) <= tol * max(1.0, self.max_abs()))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.amplitudes), initial=0.0))

    def _check_same(self, other: "SpectralField") -> None:
        if self.truncation != other.truncation:
            raise TruncationError(
                f"truncation mismatch: {self.truncation} != {other.truncation}"
            )

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_same(other)
        return SpectralField(
            self.truncation,
            self.amplitudes + other.amplitudes,
            self.reality_flag and other.reality_flag,
        )

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_same(other)
        return SpectralField(
            self.truncation,
            self.amplitudes - other.amplitudes,
            self.reality_flag and other.reality_flag,
        )

    def scale(self, factor: complex) -> "SpectralField":
        real = self.reality_flag and complex(factor).imag == 0.0
        return SpectralField(self.truncation, factor * self.amplitudes, real)

    def __repr__(self) -> str:
        return f"SpectralField(M={self.truncation}, real={self.reality_flag}, max|u_k|={self.max_abs():.3e})"


@dataclass(frozen=True)
class Dispersion:
    """Deep-water gravity dispersion ω(k) = √|k|."""

    def omega(self, k: int) -> float:
        if k == 0:
            raise ZeroModeError("ω is only used on nonzero modes")
        return math.sqrt(abs(k))

    def frequencies(self, M: int) -> np.ndarray:
        return np.sqrt(np.abs(mode_array(M)).astype(float))

    def phase(self, signs, modes) -> float:
        """Σ σ_i ω(k_i) in floating point."""
        return float(sum(s * self.omega(k) for s, k in zip(signs, modes)))


@dataclass(frozen=True)
class RealPair:
    """Surface elevation η and velocity potential trace ψ, both real."""
    eta: SpectralField
    psi: SpectralField

    def __post_init__(self):
        if not (self.eta.reality_flag and self.psi.reality_flag):
            raise RealityError("RealPair requires real η and ψ")
        if self.eta.truncation != self.psi.truncation:
            raise TruncationError("η and ψ must share the truncation")

    @property
    def truncation(self) -> int:
        return self.eta.truncation


@dataclass(frozen=True)
class ComplexPair:
    """Complex symplectic variable u; ū is implied by conjugation."""
    u: SpectralField

    @property
    def truncation(self) -> int:
        return self.u.truncation

    @classmethod
    def from_modes(cls, M: int, amplitudes: Mapping[int, complex]) -> "ComplexPair":
        return cls(SpectralField.from_modes(M, amplitudes))

    def actions(self) -> np.ndarray:
        """|u_k|² in mode order."""
        return np.abs(self.u.amplitudes) ** 2


# =============================================================================
# OPERATIONS
# =============================================================================

def sobolev_norm(f: SpectralField, s: float) -> float:
    """Homogeneous Ḣ^s norm (Σ_k |k|^{2s} |f_k|²)^{1/2}."""
    weights = np.abs(f.modes).astype(float) ** (2.0 * s)
    return float(math.sqrt(np.sum(weights * np.abs(f.amplitudes) ** 2)))


def apply_multiplier(f: SpectralField, m: Multiplier) -> SpectralField:
    """(result)_k = m(k) f_k; reality is kept when m(-k) = conj(m(k))."""
    symbol = np.asarray(m(f.modes), dtype=complex)
    real = f.reality_flag and np.allclose(symbol[::-1], np.conj(symbol), rtol=0.0, atol=1e-14)
    return SpectralField(f.truncation, symbol * f.amplitudes, bool(real))


def pointwise_product(
    f: SpectralField,
    g: SpectralField,
    out_truncation: Optional[int] = None,
) -> SpectralField:
    """
    Alias-free product fg.

    result_k = (2π)^{-1/2} Σ_{k1+k2=k} f_{k1} g_{k2} for 0 < |k| <= M'.
    The mean of fg is not part of a SpectralField and is discarded.

    Args:
        f, g: Factors
        out_truncation: M' (defaults to f.truncation + g.truncation)
    """
    M_out = out_truncation if out_truncation is not None else f.truncation + g.truncation
    N = dealiased_grid_size(max(f.truncation, g.truncation, M_out), 2)
    values = to_grid(f, N) * to_grid(g, N)
    return from_grid(values, M_out, reality_flag=f.reality_flag and g.reality_flag)


def real_to_complex_arrays(eta: np.ndarray, psi: np.ndarray, M: int) -> np.ndarray:
    """u = (|D|^{-1/4} η + i |D|^{1/4} ψ) / √2 on amplitude arrays."""
    k = np.abs(mode_array(M)).astype(float)
    return (k ** -0.25 * eta + 1j * k ** 0.25 * psi) / SQRT2


def complex_to_real_arrays(u: np.ndarray, M: int) -> Tuple[np.ndarray, np.ndarray]:
    """η = |D|^{1/4}(u+ū)/√2, ψ = -i|D|^{-1/4}(u-ū)/√2; ū_k = conj(u_{-k})."""
    k = np.abs(mode_array(M)).astype(float)
    ubar = np.conj(u[::-1])
    eta = k ** 0.25 * (u + ubar) / SQRT2
    psi = -1j * k ** -0.25 * (u - ubar) / SQRT2
    return eta, psi


def to_complex(p: RealPair) -> ComplexPair:
    M = p.truncation
    u = real_to_complex_arrays(p.eta.amplitudes, p.psi.amplitudes, M)
    return ComplexPair(SpectralField(M, u))


def from_complex(c: ComplexPair) -> RealPair:
    M = c.truncation
    eta, psi = complex_to_real_arrays(c.u.amplitudes, M)
    return RealPair(SpectralField(M, eta, True), SpectralField(M, psi, True))


# =============================================================================
# PHYSICAL GRID
# =============================================================================

def dealiased_grid_size(M: int, degree: int) -> int:
    """
    Grid size on which products of `degree` fields truncated at M are exact.

    Every intermediate mode up to degree*M is represented without aliasing,
    so Fourier multipliers may act on intermediate products.
    """
    return 2 * max(degree, 1) * M + 2


def wavenumbers(N: int) -> np.ndarray:
    return np.rint(np.fft.fftfreq(N, d=1.0 / N)).astype(int)


def to_grid(f: SpectralField, N: int) -> np.ndarray:
    """Values f(x_j) at x_j = 2πj/N."""
    if N < 2 * f.truncation + 1:
        raise TruncationError(f"grid of {N} points cannot hold M={f.truncation}")
    c = np.zeros(N, dtype=complex)
    c[f.modes % N] = f.amplitudes
    values = np.fft.ifft(c) * (N / SQRT_2PI)
    return values.real.copy() if f.reality_flag else values


def from_grid(values: np.ndarray, M: int, reality_flag: bool = False) -> SpectralField:
    """Amplitudes 0 < |k| <= M of grid values; the mean is dropped."""
    N = values.shape[0]
    if N < 2 * M + 1:
        raise TruncationError(f"grid of {N} points cannot resolve M={M}")
    c = np.fft.fft(values) * (SQRT_2PI / N)
    return SpectralField(M, c[mode_array(M) % N], reality_flag)


def grid_multiplier(values: np.ndarray, m: Multiplier) -> np.ndarray:
    """Apply a Fourier multiplier to grid values."""
    N = values.shape[0]
    out = np.fft.ifft(np.fft.fft(values) * m(wavenumbers(N)))
    return out.real if np.isrealobj(values) else out


def quadrature(values: np.ndarray) -> complex:
    """Trapezoid rule for ∫_0^{2π}; exact for trigonometric polynomials of degree < N."""
    return complex(np.sum(values) * (2.0 * math.pi / values.shape[0]))
