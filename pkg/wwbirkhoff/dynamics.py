"""
Dynamics
========

Time integration of truncated Hamiltonian flows in the complex amplitudes
u_k, 0 < |k| <= M:

    WaterWavesFlow          H² + H³ (+ H⁴), pseudo-spectral field
    ZakharovDyachenkoFlow   H² + H_ZD⁴, diagonal field -iΩ(I)u
    PolynomialFlow          any PolyHamiltonian, for cross-checks

Two fixed-step schemes are available: classical RK4 and the implicit
midpoint rule, solved by fixed-point iteration. Each run records time,
Ḣ^s norm, energy, momentum Σ k|u_k|² and the actions |u_k|².

Usage:
    from wwbirkhoff.dynamics import IntegratorConfig, integrate_ww, random_initial_datum

    u0 = random_initial_datum(16, 0.05, 1.0, seed=1)
    cfg = IntegratorConfig("implicit-midpoint", dt=0.01, T=10.0)
    record = integrate_ww(u0, 4, cfg)
    record.relative_energy_drift()
"""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .birkhoff import ActionFrequencyMap
from .constants import (
    AMPLITUDE_GUARD,
    BLOWUP_FACTOR,
    FIXED_POINT_MAX_ITER,
    GROWTH_HORIZON_CONSTANT,
    RANDOM_PROFILE_SCALE,
    TOLERANCES,
)
from .poly_hamiltonian import PolyHamiltonian, evaluate_array, hamiltonian_vector_field
from .spectral_core import (
    ComplexPair,
    SpectralField,
    complex_to_real_arrays,
    mode_array,
    real_to_complex_arrays,
)
from .ww_expansion import PseudoSpectralGrid

logger = logging.getLogger(__name__)

__all__ = [
    "DynamicsError",
    "BlowupError",
    "ConvergenceError",
    "Scheme",
    "IntegratorConfig",
    "TrajectoryRecord",
    "Flow",
    "WaterWavesFlow",
    "ZakharovDyachenkoFlow",
    "PolynomialFlow",
    "rk4_step",
    "midpoint_step",
    "integrate",
    "integrate_ww",
    "integrate_zd_exact",
    "integrate_zd_numeric",
    "random_initial_datum",
    "NormGrowthSummary",
    "norm_growth_experiment",
]


class DynamicsError(ValueError):
    """Base exception for time integration."""
    pass


class ConvergenceError(DynamicsError):
    """Raised when the implicit midpoint fixed point does not converge."""
    pass


class BlowupError(DynamicsError):
    """
    Raised when the amplitude leaves the blowup guard.

    Attributes:
        state: Last valid state
        time: Time of the last valid state
        record: Trajectory recorded up to that time
    """

    def __init__(self, message: str, state: ComplexPair, time: float, record: "TrajectoryRecord"):
        super().__init__(message)
        self.state = state
        self.time = time
        self.record = record


# =============================================================================
# CONFIGURATION
# =============================================================================

class Scheme(Enum):
    RK4 = "rk4"
    IMPLICIT_MIDPOINT = "implicit-midpoint"


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Fixed-step integrator settings.

    Raises:
        DynamicsError: On an unknown scheme, non-positive dt/T,
            dt >= T or record_every < 1
    """
    scheme: Union[Scheme, str] = Scheme.IMPLICIT_MIDPOINT
    dt: float = 0.01
    T: float = 1.0
    record_every: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        except ValueError as e:
            raise DynamicsError(f"unknown scheme {self.scheme!r}") from e
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise DynamicsError(f"dt must be positive, got {self.dt}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DynamicsError(f"T must be positive, got {self.T}")
        if self.dt >= self.T:
            raise DynamicsError(f"dt={self.dt} must be smaller than T={self.T}")
        if self.record_every < 1:
            raise DynamicsError(f"record_every must be >= 1, got {self.record_every}")

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))


# =============================================================================
# TRAJECTORY RECORD
# =============================================================================

@dataclass
class TrajectoryRecord:
    """Recorded invariants of one run; times are increasing."""
    M: int
    s: float
    times: List[float] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)
    energies: List[float] = field(default_factory=list)
    momenta: List[float] = field(default_factory=list)
    actions: List[np.ndarray] = field(default_factory=list)
    momentum_scale: float = 0.0
    final: Optional[ComplexPair] = None
    completed: bool = True

    def append(self, t: float, u: np.ndarray, energy: float) -> None:
        I = np.abs(u) ** 2
        k = mode_array(self.M).astype(float)
        if not self.times:
            self.momentum_scale = float(np.sum(np.abs(k) * I))
        self.times.append(float(t))
        self.norms.append(float(math.sqrt(np.sum(np.abs(k) ** (2.0 * self.s) * I))))
        self.energies.append(float(energy))
        self.momenta.append(float(np.sum(k * I)))
        self.actions.append(I)

    def __len__(self) -> int:
        return len(self.times)

    def action_matrix(self) -> np.ndarray:
        return np.array(self.actions).reshape(len(self.actions), 2 * self.M)

    def max_action_drift(self) -> float:
        """max_{t,k} | I_k(t) - I_k(0) |."""
        if len(self) < 2:
            return 0.0
        A = self.action_matrix()
        return float(np.max(np.abs(A - A[0])))

    def relative_energy_drift(self) -> float:
        if len(self) < 2:
            return 0.0
        E = np.array(self.energies)
        return float(np.max(np.abs(E - E[0])) / max(abs(E[0]), 1e-300))

    def relative_momentum_drift(self) -> float:
        """Drift of Σ k|u_k|² relative to Σ |k||u_k|² at t = 0."""
        if len(self) < 2:
            return 0.0
        P = np.array(self.momenta)
        return float(np.max(np.abs(P - P[0])) / max(self.momentum_scale, 1e-300))

    def norm_ratio(self) -> float:
        """sup_t ||u(t)||_s / ||u(0)||_s (1 for the zero trajectory)."""
        if not self.norms or self.norms[0] == 0.0:
            return 1.0
        return float(max(self.norms) / self.norms[0])

    def to_csv(self, path: Union[str, Path], header: Optional[str] = None, with_actions: bool = True) -> Path:
        """
        Write `t,norm_s,energy,momentum[,I_<k>...]` with round-trip floats.

        Args:
            path: Output file
            header: Optional comment line, written first with a leading '# '
            with_actions: Add one I_<k> column per mode
        """
        path = Path(path)
        modes = [int(k) for k in mode_array(self.M)]
        with path.open("w", newline="") as f:
            if header:
                f.write(f"# {header}\n")
            writer = csv.writer(f, lineterminator="\n")
            columns = ["t", "norm_s", "energy", "momentum"]
            if with_actions:
                columns += [f"I_{k}" for k in modes]
            writer.writerow(columns)
            for i, t in enumerate(self.times):
                row = [repr(t), repr(self.norms[i]), repr(self.energies[i]), repr(self.momenta[i])]
                if with_actions:
                    row += [repr(float(x)) for x in self.actions[i]]
                writer.writerow(row)
        return path


# =============================================================================
# FLOWS
# =============================================================================

class Flow:
    """Vector field u̇ = f(u) on amplitude arrays and its conserved energy."""

    def __init__(self, M: int):
        self.M = M

    def rhs(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def energy(self, u: np.ndarray) -> float:
        raise NotImplementedError


class WaterWavesFlow(Flow):
    """
    Truncated water-waves flow of H² + ... + H^degree.

    η̇ = ∇_ψ H, ψ̇ = -∇_η H evaluated pseudo-spectrally; degree 2 is the
    linear flow u_k(t) = e^{-iω_k t} u_k(0).
    """

    def __init__(self, M: int, degree: int = 4):
        if degree not in (2, 3, 4):
            raise DynamicsError(f"degree must be 2, 3 or 4, got {degree}")
        super().__init__(M)
        self.degree = degree
        self.grid = PseudoSpectralGrid(M)

    def rhs(self, u: np.ndarray) -> np.ndarray:
        eta, psi = complex_to_real_arrays(u, self.M)
        grad_eta, grad_psi = self.grid.gradients(eta, psi, self.degree)
        return real_to_complex_arrays(grad_psi, -grad_eta, self.M)

    def energy(self, u: np.ndarray) -> float:
        eta, psi = complex_to_real_arrays(u, self.M)
        return self.grid.energy(eta, psi, self.degree)


class ZakharovDyachenkoFlow(Flow):
    """ż_k = -i Ω_k(I) z_k under H² + H_ZD⁴."""

    def __init__(self, M: int):
        super().__init__(M)
        self.frequencies = ActionFrequencyMap.zakharov_dyachenko(M)

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return -1j * self.frequencies.frequencies(np.abs(u) ** 2) * u

    def energy(self, u: np.ndarray) -> float:
        return self.frequencies.energy(np.abs(u) ** 2)


class PolynomialFlow(Flow):
    """Flow of an arbitrary PolyHamiltonian, u̇_k = -i ∂_{ū_k} H."""

    def __init__(self, H: PolyHamiltonian, M: int):
        super().__init__(M)
        self.H = H
        self.field = hamiltonian_vector_field(H)

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return self.field.evaluate(ComplexPair(SpectralField(self.M, u))).amplitudes.copy()

    def energy(self, u: np.ndarray) -> float:
        return float(evaluate_array(self.H, u, self.M).real)


# =============================================================================
# SCHEMES
# =============================================================================

def rk4_step(flow: Flow, u: np.ndarray, dt: float) -> np.ndarray:
    k1 = flow.rhs(u)
    k2 = flow.rhs(u + 0.5 * dt * k1)
    k3 = flow.rhs(u + 0.5 * dt * k2)
    k4 = flow.rhs(u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _midpoint_solve(flow: Flow, u: np.ndarray, dt: float, tol: float, max_iter: int) -> Optional[np.ndarray]:
    new = u + dt * flow.rhs(u)
    for _ in range(max_iter):
        nxt = u + dt * flow.rhs(0.5 * (u + new))
        residual = float(np.max(np.abs(nxt - new)))
        new = nxt
        if residual <= tol:
            return new
    return None


def midpoint_step(
    flow: Flow,
    u: np.ndarray,
    dt: float,
    tol: float = TOLERANCES["fixed_point"],
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> np.ndarray:
    """
    One implicit midpoint step u' = u + dt f((u + u')/2).

    A step whose fixed point does not converge is retried once as two half
    steps.

    Raises:
        ConvergenceError: If the retry does not converge either
    """
    new = _midpoint_solve(flow, u, dt, tol, max_iter)
    if new is not None:
        return new
    logger.warning("midpoint fixed point did not converge at dt=%g; retrying with dt/2", dt)
    half = _midpoint_solve(flow, u, 0.5 * dt, tol, max_iter)
    if half is not None:
        new = _midpoint_solve(flow, half, 0.5 * dt, tol, max_iter)
        if new is not None:
            return new
    raise ConvergenceError(f"midpoint fixed point did not reach {tol:g} in {max_iter} iterations")


_STEPPERS: dict = {
    Scheme.RK4: lambda flow, u, dt: rk4_step(flow, u, dt),
    Scheme.IMPLICIT_MIDPOINT: lambda flow, u, dt: midpoint_step(flow, u, dt),
}


def _l2(u: np.ndarray) -> float:
    return float(math.sqrt(np.sum(np.abs(u) ** 2)))


def integrate(
    flow: Flow,
    initial: ComplexPair,
    cfg: IntegratorConfig,
    s: float = 0.0,
    deadline: Optional[float] = None,
) -> TrajectoryRecord:
    """
    Integrate a flow and record its invariants every cfg.record_every steps.

    Args:
        flow: Vector field
        initial: Initial amplitudes, truncation equal to flow.M
        cfg: Scheme, step, horizon
        s: Sobolev index of the recorded norm
        deadline: time.monotonic() value after which the run stops early
            (record.completed is then False)

    Raises:
        DynamicsError: If the initial datum exceeds the amplitude guard or
            the truncations differ
        BlowupError: If the L² norm exceeds BLOWUP_FACTOR times its initial
            value or stops being finite
        ConvergenceError: From the implicit midpoint solve
    """
    if initial.truncation != flow.M:
        raise DynamicsError(f"initial datum has M={initial.truncation}, flow has M={flow.M}")
    u = np.array(initial.u.amplitudes, dtype=complex)
    norm0 = _l2(u)
    if norm0 > AMPLITUDE_GUARD:
        raise DynamicsError(f"initial L2 norm {norm0:.3g} exceeds the amplitude guard {AMPLITUDE_GUARD}")

    step = _STEPPERS[cfg.scheme]
    record = TrajectoryRecord(flow.M, s)
    record.append(0.0, u, flow.energy(u))
    bound = BLOWUP_FACTOR * norm0
    steps = cfg.steps
    logger.info("integrating M=%d with %s, dt=%g, %d steps", flow.M, cfg.scheme.value, cfg.dt, steps)

    for n in range(1, steps + 1):
        new = step(flow, u, cfg.dt)
        norm = _l2(new)
        if not math.isfinite(norm) or norm > bound:
            t_last = (n - 1) * cfg.dt
            record.final = ComplexPair(SpectralField(flow.M, u))
            record.completed = False
            raise BlowupError(
                f"L2 norm {norm:.3g} left the guard {bound:.3g} at t={n * cfg.dt:g}",
                record.final, t_last, record,
            )
        u = new
        if n % cfg.record_every == 0 or n == steps:
            record.append(n * cfg.dt, u, flow.energy(u))
        if deadline is not None and time.monotonic() > deadline:
            if record.times[-1] != n * cfg.dt:
                record.append(n * cfg.dt, u, flow.energy(u))
            record.completed = False
            logger.info("wall budget reached at t=%g", n * cfg.dt)
            break

    record.final = ComplexPair(SpectralField(flow.M, u))
    logger.info("integration finished at t=%g", record.times[-1])
    return record


def integrate_ww(initial: ComplexPair, degree: int, cfg: IntegratorConfig, s: float = 0.0) -> TrajectoryRecord:
    """Flow of H² + H³ (+ H⁴); degree 2 gives the linear flow."""
    return integrate(WaterWavesFlow(initial.truncation, degree), initial, cfg, s)


def integrate_zd_exact(initial: ComplexPair, T: float) -> ComplexPair:
    """z_n(T) = exp(-i Ω_n(I) T) z_n(0) with I the initial actions."""
    u = initial.u.amplitudes
    omega = ActionFrequencyMap.zakharov_dyachenko(initial.truncation).frequencies(np.abs(u) ** 2)
    return ComplexPair(SpectralField(initial.truncation, np.exp(-1j * omega * T) * u))


def integrate_zd_numeric(initial: ComplexPair, cfg: IntegratorConfig, s: float = 0.0) -> TrajectoryRecord:
    return integrate(ZakharovDyachenkoFlow(initial.truncation), initial, cfg, s)


# =============================================================================
# INITIAL DATA AND EXPERIMENTS
# =============================================================================

def random_initial_datum(M: int, epsilon: float, s: float, seed: int = 0) -> ComplexPair:
    """
    Random amplitudes |u_k| ∝ e^{-|k|/4} with uniform phases, scaled so that
    ||u||_{Ḣ^s} = epsilon. The matching (η, ψ) is real.
    """
    if M < 1:
        raise DynamicsError(f"truncation must be >= 1, got {M}")
    if epsilon < 0:
        raise DynamicsError(f"epsilon must be >= 0, got {epsilon}")
    rng = np.random.default_rng(seed)
    k = np.abs(mode_array(M)).astype(float)
    phases = rng.uniform(0.0, 2.0 * math.pi, 2 * M)
    u = np.exp(-k / RANDOM_PROFILE_SCALE) * np.exp(1j * phases)
    norm = math.sqrt(np.sum(k ** (2.0 * s) * np.abs(u) ** 2))
    return ComplexPair(SpectralField(M, u * (epsilon / norm)))


@dataclass(frozen=True)
class NormGrowthSummary:
    """Outcome of one exploratory norm-growth run."""
    epsilon: float
    s: float
    M: int
    ratio: float
    t_target: float
    t_reached: float
    blowup: bool = False
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "s": self.s,
            "M": self.M,
            "ratio": self.ratio,
            "t_target": self.t_target,
            "t_reached": self.t_reached,
            "blowup": self.blowup,
            "message": self.message,
        }


def norm_growth_experiment(
    epsilon: float,
    s: float,
    M: int,
    horizon: float,
    cfg: IntegratorConfig,
    seed: int = 0,
    system: str = "ww",
    wall_budget: Optional[float] = None,
    phase: float = 0.0,
) -> NormGrowthSummary:
    """
    sup_t ||u(t)||_s / ||u(0)||_s over t <= min(horizon, c ε^{-3}).

    The datum is random_initial_datum(M, ε, s, seed) rotated by e^{i phase}.
    A blowup is reported in the summary, not raised.

    Args:
        system: "ww" (degree-4 water waves) or "zd"
        wall_budget: Seconds of wall-clock time before stopping early

    Raises:
        DynamicsError: If ε > 0.1 or system is unknown
    """
    if not (0.0 <= epsilon <= 0.1):
        raise DynamicsError(f"epsilon must lie in [0, 0.1], got {epsilon}")
    if system not in ("ww", "zd"):
        raise DynamicsError(f"unknown system {system!r}")
    if epsilon == 0.0:
        return NormGrowthSummary(epsilon, s, M, 1.0, 0.0, 0.0)

    t_target = min(horizon, GROWTH_HORIZON_CONSTANT * epsilon ** -3)
    run_cfg = IntegratorConfig(cfg.scheme, min(cfg.dt, 0.5 * t_target), t_target, cfg.record_every)
    datum = random_initial_datum(M, epsilon, s, seed)
    if phase:
        datum = ComplexPair(datum.u.scale(complex(math.cos(phase), math.sin(phase))))
    flow: Flow = WaterWavesFlow(M, 4) if system == "ww" else ZakharovDyachenkoFlow(M)
    deadline = time.monotonic() + wall_budget if wall_budget is not None else None

    try:
        record = integrate(flow, datum, run_cfg, s, deadline=deadline)
    except BlowupError as e:
        logger.warning("norm growth run blew up: %s", e)
        return NormGrowthSummary(
            epsilon, s, M, e.record.norm_ratio(), t_target, e.time, blowup=True, message=str(e)
        )
    return NormGrowthSummary(epsilon, s, M, record.norm_ratio(), t_target, record.times[-1])
