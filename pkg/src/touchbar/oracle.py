"""Direct time integration used to cross-check the modal/harmonic solution.

Constant-average-acceleration Newmark (beta = 1/4, gamma = 1/2): a fixed
step structural integrator, deliberately unrelated to the eigenbasis path.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import FactorizationError, GridMismatchError
from .fem import AssembledSystem
from .response import HarmonicExcitation, Trajectory

BETA = 0.25
GAMMA = 0.5


def harmonic_forcing(excitations: Sequence[HarmonicExcitation], n: int) -> Callable[[float], np.ndarray]:
    """Time function ``t -> sum_i g_i sin(w_i t) + h_i cos(w_i t)``."""
    if not excitations:
        zero = np.zeros(n)
        return lambda t: zero
    w = np.array([e.omega for e in excitations])
    G = np.array([e.sin_load for e in excitations])
    H = np.array([e.cos_load for e in excitations])

    def force(t: float) -> np.ndarray:
        return np.sin(w * t) @ G + np.cos(w * t) @ H

    return force


def newmark_integrate(
    system: AssembledSystem,
    forcing: Callable[[float], np.ndarray],
    d0,
    v0,
    dt: float,
    duration: float,
    max_frequency_hz: Optional[float] = None,
) -> Trajectory:
    """Integrate ``M d'' + C d' + K d = f(t)`` from ``(d0, v0)``.

    Parameters
    ----------
    forcing : callable
        Returns the load vector at time ``t``.
    max_frequency_hz : float, optional
        Highest forcing frequency; when given, ``dt`` must resolve it with
        at least 20 steps per period.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if max_frequency_hz is not None and dt > 1.0 / (20.0 * max_frequency_hz):
        raise ValueError(f"dt={dt} s is coarser than 1/20 of the {max_frequency_hz} Hz forcing period")
    M, C, K = system.mass, system.damping, system.stiffness
    n = M.shape[0]
    steps = int(round(duration / dt))
    times = np.arange(steps + 1) * dt

    d = np.zeros((steps + 1, n))
    v = np.zeros((steps + 1, n))
    a = np.zeros((steps + 1, n))
    d[0] = np.zeros(n) if d0 is None else d0
    v[0] = np.zeros(n) if v0 is None else v0

    try:
        mass_factor = scipy.linalg.cho_factor(M)
        a[0] = scipy.linalg.cho_solve(mass_factor, forcing(0.0) - C @ v[0] - K @ d[0])
        c0 = 1.0 / (BETA * dt**2)
        c1 = GAMMA / (BETA * dt)
        c2 = 1.0 / (BETA * dt)
        c3 = 1.0 / (2 * BETA) - 1.0
        c4 = GAMMA / BETA - 1.0
        c5 = dt / 2 * (GAMMA / BETA - 2.0)
        k_eff = K + c0 * M + c1 * C
        factor = scipy.linalg.lu_factor(k_eff, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationError(f"Newmark factorization failed: {exc}") from exc
    if not np.all(np.isfinite(factor[0])) or np.any(np.diag(factor[0]) == 0):
        raise FactorizationError("effective stiffness matrix is singular")

    for k in range(steps):
        rhs = forcing(times[k + 1]) + M @ (c0 * d[k] + c2 * v[k] + c3 * a[k]) + C @ (c1 * d[k] + c4 * v[k] + c5 * a[k])
        d[k + 1] = scipy.linalg.lu_solve(factor, rhs, check_finite=False)
        a[k + 1] = c0 * (d[k + 1] - d[k]) - c2 * v[k] - c3 * a[k]
        v[k + 1] = v[k] + dt * ((1 - GAMMA) * a[k] + GAMMA * a[k + 1])
    return Trajectory(times, d, v, a)


def compare_trajectories(a: Trajectory, b: Trajectory, settle_time: float = 0.0, dofs=None) -> tuple[float, float]:
    """Worst per-DOF ``(max, rms)`` error of ``b`` against ``a`` for ``t >= settle_time``.

    Each DOF is normalized by the largest ``|a|`` it reaches in the window.
    """
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=1e-12 * max(1.0, float(np.abs(a.times).max(initial=0)))):
        raise GridMismatchError("trajectories are sampled on different time grids")
    window = a.times >= settle_time
    xa = a.displacements[window]
    xb = b.displacements[window]
    if dofs is not None:
        xa, xb = xa[:, dofs], xb[:, dofs]
    if xa.size == 0:
        return 0.0, 0.0
    scale = np.abs(xa).max(axis=0)
    fallback = scale.max()
    if fallback == 0:
        err = np.abs(xb - xa)
        return float(err.max()), float(np.sqrt((err**2).mean()))
    scale = np.where(scale > 0, scale, fallback)
    err = np.abs(xb - xa) / scale
    return float(err.max()), float(np.sqrt((err**2).mean(axis=0)).max())
