"""Multi-frequency harmonic response of the assembled bar.

Forcing is a sum of harmonics ``g_i sin(w_i t) + h_i cos(w_i t)``.  Each
harmonic is solved on its own for the steady coefficients ``(p_i, q_i)``
of ``p_i cos(w_i t) + q_i sin(w_i t)``; the transient part comes from the
state-space eigenbasis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import dgecon, zgecon

from .errors import (
    EigenbasisSingularError,
    NodeOutOfRangeError,
    ResonanceSingularError,
    SolverError,
)
from .fem import TRANSLATION, AssembledSystem
from .modal import ModalResult, modes
from .model import ActuatorAttachment, ActuatorBase, DirectForce, StudyConfig, resolve_damping
from .units import STANDARD_GRAVITY

RCOND_MIN = 1e-14
RESIDUAL_TOL = 1e-10


class UnknownAttachmentError(NodeOutOfRangeError):
    pass


@dataclass(frozen=True, eq=False)
class HarmonicExcitation:
    """Load vectors of one harmonic: ``g sin(omega t) + h cos(omega t)``."""

    omega: float
    sin_load: np.ndarray
    cos_load: np.ndarray
    label: str = ""

    @property
    def frequency_hz(self) -> float:
        return self.omega / (2 * math.pi)

    def scaled(self, factor: float) -> "HarmonicExcitation":
        return HarmonicExcitation(self.omega, factor * self.sin_load, factor * self.cos_load, self.label)


@dataclass(frozen=True, eq=False)
class SteadyState:
    """Steady coefficients, one row per excitation: ``d_i(t) = p_i cos + q_i sin``."""

    omegas: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    @property
    def count(self) -> int:
        return len(self.omegas)

    @classmethod
    def empty(cls, n: int) -> "SteadyState":
        return cls(np.zeros(0), np.zeros((0, n)), np.zeros((0, n)))

    def displacement(self, times) -> np.ndarray:
        """Steady displacement at each time, shape ``(len(times), n)``."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        wt = np.outer(t, self.omegas)
        return np.cos(wt) @ self.cos_coeffs + np.sin(wt) @ self.sin_coeffs

    def velocity(self, times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        wt = np.outer(t, self.omegas)
        w = self.omegas[:, None]
        return np.cos(wt) @ (w * self.sin_coeffs) - np.sin(wt) @ (w * self.cos_coeffs)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    displacements: np.ndarray
    velocities: Optional[np.ndarray] = None
    accelerations: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or (t.size > 1 and np.any(np.diff(t) <= 0)):
            raise ValueError("trajectory times must be a strictly increasing 1-D sequence")


@dataclass(frozen=True, eq=False)
class PeakAccelerationField:
    positions: np.ndarray
    peaks_g: np.ndarray
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self):
        if len(self.positions) != len(self.peaks_g):
            raise ValueError("positions and peaks_g must have equal length")

    @property
    def peaks(self) -> np.ndarray:
        """Peak acceleration in m/s^2."""
        return self.peaks_g * self.gravity


def _unit_load(system: AssembledSystem, position: float) -> np.ndarray:
    node = system.mesh.node_index(position)
    if node is None:
        raise NodeOutOfRangeError(f"no mesh node at {position} m")
    e = np.zeros(system.n)
    e[system.dof_index(node, TRANSLATION)] = 1.0
    return e


def base_excitation_forces(
    system: AssembledSystem, attachment: ActuatorAttachment, frequency_hz: float
) -> HarmonicExcitation:
    """Force transmitted by the actuator's spring and damper when its base
    moves as ``a sin(omega t)``: ``k_b a sin(omega t) + c a omega cos(omega t)``.
    """
    try:
        e = _unit_load(system, attachment.position)
    except NodeOutOfRangeError as exc:
        raise UnknownAttachmentError(f"attachment at {attachment.position} m is not part of this system") from exc
    omega = 2 * math.pi * frequency_hz
    a = attachment.base_amplitude
    g = attachment.stiffness * a * e
    h = resolve_damping(attachment) * a * omega * e
    return HarmonicExcitation(omega, g, h, attachment.label)


def direct_force(system: AssembledSystem, position: float, force_amplitude: float, frequency_hz: float) -> HarmonicExcitation:
    """Point force ``F sin(omega t)`` on the translational DOF at ``position``."""
    e = _unit_load(system, position)
    return HarmonicExcitation(2 * math.pi * frequency_hz, force_amplitude * e, np.zeros(system.n))


def excitations_from_config(system: AssembledSystem, config: StudyConfig) -> list[HarmonicExcitation]:
    out = []
    for command in config.excitations:
        if isinstance(command, ActuatorBase):
            att = config.attachments[command.attachment]
            out.append(base_excitation_forces(system, att, command.frequency_hz))
        elif isinstance(command, DirectForce):
            out.append(direct_force(system, command.position, command.force_amplitude, command.frequency_hz))
    return out


def harmonic_matrix(system: AssembledSystem, omega: float) -> np.ndarray:
    """``[[K - w^2 M, w C], [-w C, K - w^2 M]]`` acting on ``(p, q)``."""
    D = system.stiffness - omega**2 * system.mass
    wC = omega * system.damping
    return np.block([[D, wC], [-wC, D]])


def _solve_one(system: AssembledSystem, exc: HarmonicExcitation) -> tuple[np.ndarray, np.ndarray]:
    n = system.n
    B = harmonic_matrix(system, exc.omega)
    rhs = np.concatenate([exc.cos_load, exc.sin_load])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(B, check_finite=False)
    anorm = np.abs(B).sum(axis=0).max()
    rcond, _ = dgecon(lu, anorm, norm="1")
    if not rcond >= RCOND_MIN:
        raise ResonanceSingularError(
            f"harmonic system singular at {exc.frequency_hz:.6g} Hz (rcond {rcond:.2e}): "
            "undamped resonance, no steady state exists"
        )
    # cos and sin loads are solved as separate max-normalized columns, so the
    # response stays proportional to each load amplitude to rounding level
    zero = np.zeros(n)
    cols = np.column_stack([np.concatenate([exc.cos_load, zero]), np.concatenate([zero, exc.sin_load])])
    peaks = np.abs(cols).max(axis=0)
    scale = np.where(peaks > 0, peaks, 1.0)
    x = scipy.linalg.lu_solve((lu, piv), cols / scale, check_finite=False) @ peaks
    denom = anorm * np.abs(x).sum() + np.abs(rhs).sum()
    if denom > 0:
        resid = np.abs(B @ x - rhs).sum() / denom
        if resid > RESIDUAL_TOL:
            raise SolverError(f"steady-state residual {resid:.2e} above {RESIDUAL_TOL}")
    return x[:n], x[n:]


def steady_state(system: AssembledSystem, excitations: Sequence[HarmonicExcitation]) -> SteadyState:
    """Solve every excitation independently for its steady coefficients."""
    n = system.n
    if not excitations:
        return SteadyState.empty(n)
    ps, qs = [], []
    for exc in excitations:
        if not exc.omega > 0:
            raise ValueError(f"excitation frequency must be positive, got omega={exc.omega}")
        p, q = _solve_one(system, exc)
        ps.append(p)
        qs.append(q)
    return SteadyState(np.array([e.omega for e in excitations], dtype=float), np.array(ps), np.array(qs))


def complete_response(
    system: AssembledSystem,
    excitations: Sequence[HarmonicExcitation],
    d0,
    v0,
    times,
    modal: Optional[ModalResult] = None,
    steady: Optional[SteadyState] = None,
) -> Trajectory:
    """Transient plus steady response from initial state ``(d0, v0)``.

    The homogeneous part is ``sum_j eps_j r_j exp(s_j t)`` with ``eps``
    chosen so the total matches the initial state.
    """
    n = system.n
    modal = modes(system) if modal is None else modal
    steady = steady_state(system, excitations) if steady is None else steady
    d0 = np.zeros(n) if d0 is None else np.asarray(d0, dtype=float)
    v0 = np.zeros(n) if v0 is None else np.asarray(v0, dtype=float)
    t = np.asarray(times, dtype=float)

    V = modal.eigenvectors
    rhs = np.concatenate([d0 - steady.cos_coeffs.sum(axis=0), v0 - (steady.omegas[:, None] * steady.sin_coeffs).sum(axis=0)])
    lu, piv = scipy.linalg.lu_factor(V, check_finite=False)
    rcond, _ = zgecon(lu, np.abs(V).sum(axis=0).max(), norm="1")
    if not rcond >= RCOND_MIN:
        raise EigenbasisSingularError(f"state eigenvectors are numerically dependent (rcond {rcond:.2e})")
    eps = scipy.linalg.lu_solve((lu, piv), rhs.astype(complex), check_finite=False)

    s = modal.eigenvalues
    r = modal.mode_shapes()
    growth = np.exp(np.outer(t, s)) * eps
    hom_d = growth @ r.T
    hom_v = (growth * s) @ r.T
    hom_a = (growth * s**2) @ r.T

    d = steady.displacement(t) + hom_d.real
    dnorm = np.abs(d).max() if d.size else 0.0
    if d.size and np.abs(hom_d.imag).max() > 1e-8 * max(dnorm, np.finfo(float).tiny):
        raise SolverError("homogeneous response has a non-negligible imaginary part")
    v = steady.velocity(t) + hom_v.real
    a = acceleration_series(steady, t) + hom_a.real
    return Trajectory(t, d, v, a)


def acceleration_series(steady: SteadyState, times) -> np.ndarray:
    """Steady acceleration ``-sum_i w_i^2 (p_i cos + q_i sin)`` at each time."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if steady.count == 0:
        return np.zeros((t.size, steady.cos_coeffs.shape[1]))
    wt = np.outer(t, steady.omegas)
    w2 = steady.omegas[:, None] ** 2
    return -(np.cos(wt) @ (w2 * steady.cos_coeffs) + np.sin(wt) @ (w2 * steady.sin_coeffs))


def peak_amplitudes(steady: SteadyState) -> np.ndarray:
    """Per-excitation acceleration amplitude ``w_i^2 sqrt(p_i^2 + q_i^2)`` (m x n)."""
    return steady.omegas[:, None] ** 2 * np.hypot(steady.cos_coeffs, steady.sin_coeffs)


def peak_acceleration_field(
    system: AssembledSystem, steady: SteadyState, gravity: float = STANDARD_GRAVITY
) -> PeakAccelerationField:
    """Sum over excitations of the acceleration amplitudes, at translational DOFs, in g."""
    dofs = system.translational_dofs()
    total = np.zeros(dofs.size)
    for row in peak_amplitudes(steady):
        total = total + row[dofs]
    return PeakAccelerationField(system.translational_positions(), total / gravity, gravity)
