"""Hermite beam elements and global assembly.

Each node carries a transverse displacement ``u`` and a slope ``theta``.
The global DOF vector is ordered node by node: ``(u0, th0, u1, th1, ...)``.
Actuators enter as grounded spring, damper and bolt mass on the
translational DOF of their node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AttachmentNodeMissingError,
    ConfigError,
    NodeOutOfRangeError,
    PositionOutOfRangeError,
)
from .model import ActuatorAttachment, BeamGeometry, Material, derived_section, resolve_damping

TRANSLATION = 0
ROTATION = 1

_SNAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Mesh:
    node_positions: np.ndarray
    attachment_nodes: dict = field(default_factory=dict)

    @property
    def length(self) -> float:
        return float(self.node_positions[-1])

    @property
    def node_count(self) -> int:
        return len(self.node_positions)

    @property
    def element_count(self) -> int:
        return len(self.node_positions) - 1

    @property
    def element_spans(self) -> list[tuple[int, int, float]]:
        x = self.node_positions
        return [(i, i + 1, float(x[i + 1] - x[i])) for i in range(len(x) - 1)]

    @property
    def dof_count(self) -> int:
        return 2 * self.node_count

    def node_index(self, position: float) -> int | None:
        """Index of the node sitting at ``position`` (within 1e-9 L), else None."""
        i = int(np.argmin(np.abs(self.node_positions - position)))
        if abs(self.node_positions[i] - position) <= _SNAP_TOL * self.length:
            return i
        return None

    def nearest_node(self, position: float) -> int:
        return int(np.argmin(np.abs(self.node_positions - position)))


def generate_mesh(length: float, element_count: int, attachment_positions=()) -> Mesh:
    """Uniform mesh with extra nodes inserted at every requested position.

    A position within ``1e-9 * length`` of an existing node moves that node
    onto it; otherwise the containing element is split.  The returned mesh
    may therefore have more elements than requested.
    """
    if not isinstance(element_count, (int, np.integer)) or element_count < 2:
        raise ConfigError(f"element_count must be an integer >= 2, got {element_count!r}")
    if not length > 0:
        raise ConfigError(f"length must be positive, got {length!r}")
    nodes = list(np.linspace(0.0, length, element_count + 1))
    nodes[0], nodes[-1] = 0.0, float(length)
    tol = _SNAP_TOL * length
    for x in attachment_positions:
        x = float(x)
        if not (-tol <= x <= length + tol):
            raise PositionOutOfRangeError(f"position {x} m lies outside [0, {length}] m")
        x = min(max(x, 0.0), float(length))
        arr = np.asarray(nodes)
        i = int(np.argmin(np.abs(arr - x)))
        if abs(arr[i] - x) <= tol:
            # keep the bar ends exact
            if i not in (0, len(nodes) - 1):
                nodes[i] = x
        else:
            nodes.insert(int(np.searchsorted(arr, x)), x)
    positions = np.asarray(nodes, dtype=float)
    if np.any(np.diff(positions) <= 0):
        raise ConfigError("requested node positions are closer than the mesh can resolve")
    mesh = Mesh(positions)
    attachment_nodes = {k: mesh.node_index(float(x)) for k, x in enumerate(attachment_positions)}
    return Mesh(positions, attachment_nodes)


@dataclass(frozen=True, eq=False)
class ElementMatrices:
    stiffness: np.ndarray
    mass: np.ndarray


def element_matrices(E: float, I: float, rho: float, A: float, l: float) -> ElementMatrices:
    """Stiffness and consistent mass of a two-node Hermite cubic beam element.

    DOF order is ``(u1, theta1, u2, theta2)``.
    """
    for name, value in (("E", E), ("I", I), ("rho", rho), ("A", A), ("l", l)):
        if not value > 0:
            raise ConfigError(f"element parameter {name} must be positive, got {value!r}")
    k = E * I / l**3 * np.array(
        [
            [12.0, 6 * l, -12.0, 6 * l],
            [6 * l, 4 * l**2, -6 * l, 2 * l**2],
            [-12.0, -6 * l, 12.0, -6 * l],
            [6 * l, 2 * l**2, -6 * l, 4 * l**2],
        ]
    )
    m = rho * A * l / 420.0 * np.array(
        [
            [156.0, 22 * l, 54.0, -13 * l],
            [22 * l, 4 * l**2, 13 * l, -3 * l**2],
            [54.0, 13 * l, 156.0, -22 * l],
            [-13 * l, -3 * l**2, -22 * l, 4 * l**2],
        ]
    )
    return ElementMatrices(k, m)


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Global ``M d'' + C d' + K d = f`` with its DOF bookkeeping.

    ``dof_map[k] = (node, kind)`` where kind is TRANSLATION or ROTATION.
    """

    mass: np.ndarray
    damping: np.ndarray
    stiffness: np.ndarray
    mesh: Mesh
    dof_map: tuple

    @property
    def n(self) -> int:
        return self.mass.shape[0]

    def dof_index(self, node: int, kind: int = TRANSLATION) -> int:
        try:
            return self.dof_map.index((node, kind))
        except ValueError:
            raise NodeOutOfRangeError(f"no free DOF for node {node}, kind {kind}") from None

    def translational_dofs(self) -> np.ndarray:
        return np.array([k for k, (_, kind) in enumerate(self.dof_map) if kind == TRANSLATION], dtype=int)

    def translational_positions(self) -> np.ndarray:
        x = self.mesh.node_positions
        return np.array([x[node] for node, kind in self.dof_map if kind == TRANSLATION])


def assemble(
    mesh: Mesh,
    material: Material,
    geometry: BeamGeometry,
    attachments=(),
) -> AssembledSystem:
    area, second_moment = derived_section(geometry)
    n = mesh.dof_count
    M = np.zeros((n, n))
    K = np.zeros((n, n))
    C = np.zeros((n, n))
    for left, _right, l in mesh.element_spans:
        em = element_matrices(material.elastic_modulus, second_moment, material.density, area, l)
        sl = slice(2 * left, 2 * left + 4)
        K[sl, sl] += em.stiffness
        M[sl, sl] += em.mass
    for att in attachments:
        add_attachment(K, C, M, mesh, att)
    dof_map = tuple((node, kind) for node in range(mesh.node_count) for kind in (TRANSLATION, ROTATION))
    return AssembledSystem(M, C, K, mesh, dof_map)


def add_attachment(K, C, M, mesh: Mesh, attachment: ActuatorAttachment) -> None:
    node = mesh.node_index(attachment.position)
    if node is None:
        raise AttachmentNodeMissingError(
            f"no mesh node at attachment position {attachment.position} m"
        )
    k = 2 * node
    K[k, k] += attachment.stiffness
    C[k, k] += resolve_damping(attachment)
    M[k, k] += attachment.bolt_mass


def constrain_pinned(system: AssembledSystem, node_indices) -> AssembledSystem:
    """Eliminate the translational DOF of each listed node; slopes stay free."""
    remove = set()
    for node in node_indices:
        node = int(node)
        if not 0 <= node < system.mesh.node_count:
            raise NodeOutOfRangeError(f"node {node} outside 0..{system.mesh.node_count - 1}")
        if (node, TRANSLATION) in system.dof_map:
            remove.add(system.dof_map.index((node, TRANSLATION)))
    keep = np.array([k for k in range(system.n) if k not in remove], dtype=int)
    ix = np.ix_(keep, keep)
    return AssembledSystem(
        system.mass[ix].copy(),
        system.damping[ix].copy(),
        system.stiffness[ix].copy(),
        system.mesh,
        tuple(system.dof_map[k] for k in keep),
    )


def build_system(config) -> AssembledSystem:
    """Mesh, assemble and constrain the model described by a StudyConfig."""
    # attachments come first, so attachment_nodes keys match config.attachments
    mesh = generate_mesh(config.geometry.length, config.element_count, config.node_positions_required())
    system = assemble(mesh, config.material, config.geometry, config.attachments)
    if config.pinned_positions:
        system = constrain_pinned(system, [mesh.node_index(x) for x in config.pinned_positions])
    return system
