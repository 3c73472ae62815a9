"""Damped modes from the first-order (state-space) form, plus closed-form checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EigenNoConvergenceError, SingularMassError
from .fem import AssembledSystem
from .model import BeamGeometry, Material

RESIDUAL_TOL = 1e-8


def _mass_factor(M: np.ndarray):
    try:
        return scipy.linalg.cho_factor(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularMassError(f"mass matrix is not positive definite: {exc}") from exc


def solve_mass(system: AssembledSystem, rhs: np.ndarray) -> np.ndarray:
    """``M^-1 rhs`` from one Cholesky factorization, with one refinement step."""
    factor = _mass_factor(system.mass)
    x = scipy.linalg.cho_solve(factor, rhs)
    x += scipy.linalg.cho_solve(factor, rhs - system.mass @ x)
    return x


def state_matrix(system: AssembledSystem) -> np.ndarray:
    """``[[0, I], [-M^-1 K, -M^-1 C]]`` for the state ``(d, d')``."""
    n = system.n
    minv_kc = solve_mass(system, np.hstack([system.stiffness, system.damping]))
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = np.eye(n)
    A[n:, :n] = -minv_kc[:, :n]
    A[n:, n:] = -minv_kc[:, n:]
    return A


@dataclass(frozen=True, eq=False)
class ModalResult:
    """Eigenpairs of the state matrix.

    Columns of ``eigenvectors`` are state vectors ``(r_j, s_j r_j)`` with
    unit 2-norm.  Eigenvalues are sorted by ascending ``|Im s|`` with each
    conjugate pair adjacent, positive imaginary part first.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    state_matrix: np.ndarray

    @property
    def damped_frequencies_hz(self) -> np.ndarray:
        return np.abs(self.eigenvalues.imag) / (2 * np.pi)

    @property
    def modal_damping(self) -> np.ndarray:
        mag = np.abs(self.eigenvalues)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(mag > 0, -self.eigenvalues.real / mag, 0.0)

    @property
    def n(self) -> int:
        return self.eigenvalues.size // 2

    def mode_shapes(self) -> np.ndarray:
        """Displacement part ``r_j`` of every eigenvector (n x 2n)."""
        return self.eigenvectors[: self.n]

    def natural_frequencies_hz(self) -> np.ndarray:
        """One damped frequency per oscillatory pair (Im s > 0), ascending."""
        s = self.eigenvalues
        return np.sort(s[s.imag > 0].imag) / (2 * np.pi)


def modes(system: AssembledSystem) -> ModalResult:
    A = state_matrix(system)
    try:
        s, V = scipy.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise EigenNoConvergenceError(str(exc)) from exc
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(V))):
        raise EigenNoConvergenceError("eigensolver returned non-finite values")
    order = np.lexsort((s.real, -s.imag, np.abs(s.imag)))
    s, V = s[order], V[:, order]
    V = V / np.linalg.norm(V, axis=0)
    norm_a = np.linalg.norm(A, 2)
    residual = np.linalg.norm(A @ V - V * s, axis=0)
    worst = float(residual.max()) if residual.size else 0.0
    if worst > RESIDUAL_TOL * norm_a:
        raise EigenNoConvergenceError(
            f"eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOL} * ||A|| = {RESIDUAL_TOL * norm_a:.3e}"
        )
    return ModalResult(s, V, A)


def undamped_frequencies_hz(system: AssembledSystem) -> np.ndarray:
    """Natural frequencies from the symmetric pencil ``K phi = lambda M phi``."""
    lam = scipy.linalg.eigh(system.stiffness, system.mass, eigvals_only=True)
    return np.sqrt(np.clip(lam, 0.0, None)) / (2 * np.pi)


def analytical_pinned_frequencies(material: Material, geometry: BeamGeometry, count: int) -> list[float]:
    """Closed-form natural frequencies [Hz] of a simply supported prismatic beam.

    ``f_n = (n pi / L)^2 sqrt(E I / (rho A)) / (2 pi)``
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    L = geometry.length
    c = math.sqrt(material.elastic_modulus * geometry.second_moment / (material.density * geometry.area))
    return [(n * math.pi / L) ** 2 * c / (2 * math.pi) for n in range(1, count + 1)]
