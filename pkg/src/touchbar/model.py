"""Physical records for the touch bar and its actuators.

All values are SI.  Records validate themselves on construction and are
frozen afterwards, so they can be handed to concurrent sweep workers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ConfigError, MissingMassError, UnknownMaterialError
from .units import STANDARD_GRAVITY


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ConfigError(f"{name} must be a positive finite number, got {value!r}")


def _require_nonnegative(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
            raise ConfigError(f"{name} must be a nonnegative finite number, got {value!r}")


@dataclass(frozen=True)
class Material:
    """Homogeneous isotropic bar material.

    Attributes
    ----------
    name : str
    elastic_modulus : float
        Young's modulus [Pa].
    density : float
        Mass density [kg/m^3].
    """

    name: str
    elastic_modulus: float
    density: float

    def __post_init__(self):
        _require_positive(elastic_modulus=self.elastic_modulus, density=self.density)


_CATALOG = {
    "aluminum": Material("aluminum", 70e9, 2700.0),
    "dragontrail": Material("dragontrail", 74e9, 2480.0),
    "copper": Material("copper", 130e9, 8960.0),
}
_ALIASES = {
    "aluminium": "aluminum",
    "dragontrail glass": "dragontrail",
    "dragontrail_glass": "dragontrail",
}


def material_catalog(name: str) -> Material:
    """Look up one of the tabulated touch-surface materials (case-insensitive)."""
    key = str(name).strip().lower()
    key = _ALIASES.get(key, key)
    try:
        return _CATALOG[key]
    except KeyError:
        raise UnknownMaterialError(
            f"unknown material {name!r}; known: {', '.join(sorted(_CATALOG))}"
        ) from None


def catalog_names() -> list[str]:
    return sorted(_CATALOG)


@dataclass(frozen=True)
class BeamGeometry:
    length: float
    width: float
    thickness: float

    def __post_init__(self):
        _require_positive(length=self.length, width=self.width, thickness=self.thickness)
        if self.thickness / self.length > 0.05:
            warnings.warn(
                f"thickness/length = {self.thickness / self.length:.3g} > 0.05; "
                "thin-beam (Euler-Bernoulli) assumptions are doubtful",
                stacklevel=3,
            )

    @property
    def area(self) -> float:
        return self.width * self.thickness

    @property
    def second_moment(self) -> float:
        return self.width * self.thickness**3 / 12.0


def derived_section(geometry: BeamGeometry) -> tuple[float, float]:
    """Return ``(area, second_moment)`` of the rectangular section."""
    return geometry.area, geometry.second_moment


@dataclass(frozen=True)
class ActuatorAttachment:
    """One actuator bolted to the bar: a grounded spring, damper and bolt mass.

    Give exactly one of ``damping_ratio`` or ``damping_coefficient``.  A
    damping ratio is converted with the bolt mass, so it needs
    ``bolt_mass > 0``.
    """

    position: float
    stiffness: float
    bolt_mass: float
    base_amplitude: float = 0.0
    damping_ratio: Optional[float] = None
    damping_coefficient: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        _require_nonnegative(
            position=self.position,
            stiffness=self.stiffness,
            bolt_mass=self.bolt_mass,
            base_amplitude=self.base_amplitude,
        )
        if (self.damping_ratio is None) == (self.damping_coefficient is None):
            raise ConfigError("give exactly one of damping_ratio or damping_coefficient")
        if self.damping_ratio is not None:
            _require_nonnegative(damping_ratio=self.damping_ratio)
            if self.bolt_mass <= 0:
                raise MissingMassError(
                    "damping_ratio needs bolt_mass > 0 to derive a damping coefficient"
                )
        else:
            _require_nonnegative(damping_coefficient=self.damping_coefficient)

    @property
    def damping(self) -> float:
        return resolve_damping(self)


def resolve_damping(attachment: ActuatorAttachment) -> float:
    """Damping coefficient c [N s/m] of an attachment.

    A damping ratio is mapped with the single-oscillator rule
    ``c = 2 * zeta * sqrt(k_b * m_b)``.
    """
    if attachment.damping_coefficient is not None:
        return float(attachment.damping_coefficient)
    if attachment.bolt_mass <= 0:
        raise MissingMassError("damping_ratio needs bolt_mass > 0")
    return 2.0 * attachment.damping_ratio * math.sqrt(attachment.stiffness * attachment.bolt_mass)


@dataclass(frozen=True)
class DirectForce:
    """Harmonic point force ``force_amplitude * sin(2 pi f t)`` at ``position``."""

    frequency_hz: float
    position: float
    force_amplitude: float

    def __post_init__(self):
        _require_positive(frequency_hz=self.frequency_hz)
        _require_nonnegative(position=self.position, force_amplitude=self.force_amplitude)


@dataclass(frozen=True)
class ActuatorBase:
    """Sinusoidal base motion of attachment number ``attachment``."""

    frequency_hz: float
    attachment: int

    def __post_init__(self):
        _require_positive(frequency_hz=self.frequency_hz)
        if not isinstance(self.attachment, int) or self.attachment < 0:
            raise ConfigError(f"attachment index must be a nonnegative int, got {self.attachment!r}")


ExcitationCommand = Union[DirectForce, ActuatorBase]


@dataclass(frozen=True)
class StudyConfig:
    """Everything needed to build and drive one touch bar model.

    ``pinned_positions`` lists points with zero transverse displacement;
    it is empty for the actuator-supported bar and ``(0, L)`` for the
    simply supported validation case.  ``probe_positions`` are extra
    points that must become mesh nodes so results are reported there.
    """

    material: Material
    geometry: BeamGeometry
    attachments: tuple = ()
    excitations: tuple = ()
    element_count: int = 30
    gravity: float = STANDARD_GRAVITY
    pinned_positions: tuple = field(default=())
    probe_positions: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "attachments", tuple(self.attachments))
        object.__setattr__(self, "excitations", tuple(self.excitations))
        object.__setattr__(self, "pinned_positions", tuple(float(x) for x in self.pinned_positions))
        object.__setattr__(self, "probe_positions", tuple(float(x) for x in self.probe_positions))
        if not isinstance(self.element_count, int) or self.element_count < 2:
            raise ConfigError(f"element_count must be an integer >= 2, got {self.element_count!r}")
        _require_positive(gravity=self.gravity)
        length = self.geometry.length
        for att in self.attachments:
            if att.position > length:
                raise ConfigError(f"attachment at {att.position} m lies beyond the bar ({length} m)")
        for x in self.pinned_positions + self.probe_positions:
            if not 0 <= x <= length:
                raise ConfigError(f"node position {x} m lies outside [0, {length}] m")
        for exc in self.excitations:
            if isinstance(exc, ActuatorBase):
                if exc.attachment >= len(self.attachments):
                    raise ConfigError(
                        f"excitation references attachment {exc.attachment}, "
                        f"but only {len(self.attachments)} are defined"
                    )
            elif isinstance(exc, DirectForce):
                if exc.position > length:
                    raise ConfigError(f"force at {exc.position} m lies beyond the bar")
            else:
                raise ConfigError(f"unsupported excitation {exc!r}")

    def node_positions_required(self) -> list[float]:
        """Positions that must coincide with mesh nodes."""
        points = [a.position for a in self.attachments]
        points += [e.position for e in self.excitations if isinstance(e, DirectForce)]
        points += list(self.pinned_positions)
        points += list(self.probe_positions)
        return points
