"""Study configuration files (JSON or YAML).

Every dimensional value is a string with a unit suffix.  Positions may
also be given as a fraction of the bar length with the ``L`` suffix,
e.g. ``"0.16 L"``.  Example::

    material: aluminum
    geometry: {length: 12 in, width: 0.984 in, thickness: 0.03937 in}
    mesh: {elements: 30}
    actuator_defaults:
      stiffness: 16.18 kN/m
      bolt_mass: 5 g
      damping_ratio: 0.02
      base_amplitude: 0.04125 mm
    attachments:
      - {label: left, position: 0.16 L}
      - {label: right, position: 0.84 L}
    excitations:
      - {kind: actuator, attachment: left, frequency: 170 Hz}
      - {kind: actuator, attachment: right, frequency: 230 Hz}
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .errors import ConfigError
from .model import (
    ActuatorAttachment,
    ActuatorBase,
    BeamGeometry,
    DirectForce,
    Material,
    StudyConfig,
    material_catalog,
)
from .units import STANDARD_GRAVITY, parse_quantity

REFERENCE_GEOMETRY = {"length": "12 in", "width": "0.984 in", "thickness": "0.03937 in"}
REFERENCE_ACTUATOR = {
    "stiffness": "16.18 kN/m",
    "bolt_mass": "5 g",
    "damping_ratio": 0.02,
    "base_amplitude": "0.04125 mm",
}

_FRACTION = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*L\s*$")


def read_document(path) -> tuple[dict, bytes]:
    """Load a JSON or YAML file; returns the mapping and the raw bytes."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    text = raw.decode("utf-8")
    try:
        if path.suffix.lower() == ".json":
            doc = json.loads(text)
        else:
            doc = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return doc, raw


def parse_position(value, length: float) -> float:
    if isinstance(value, str):
        m = _FRACTION.match(value)
        if m:
            return float(m.group(1)) * length
    return parse_quantity(value, "length")


def parse_material(value) -> Material:
    if isinstance(value, str):
        return material_catalog(value)
    if isinstance(value, dict):
        try:
            return Material(
                str(value.get("name", "custom")),
                parse_quantity(value["elastic_modulus"], "pressure"),
                parse_quantity(value["density"], "density"),
            )
        except KeyError as exc:
            raise ConfigError(f"material needs {exc.args[0]!r}") from None
    raise ConfigError(f"material must be a catalog name or a mapping, got {value!r}")


def parse_geometry(value: dict) -> BeamGeometry:
    try:
        return BeamGeometry(*(parse_quantity(value[k], "length") for k in ("length", "width", "thickness")))
    except KeyError as exc:
        raise ConfigError(f"geometry needs {exc.args[0]!r}") from None
    except TypeError:
        raise ConfigError("geometry must be a mapping") from None


def parse_attachment(spec: dict, defaults: dict, length: float) -> ActuatorAttachment:
    merged = {**defaults, **spec}
    if "position" not in merged:
        raise ConfigError("attachment needs a position")
    ratio = merged.get("damping_ratio")
    coefficient = merged.get("damping_coefficient")
    try:
        return ActuatorAttachment(
            position=parse_position(merged["position"], length),
            stiffness=parse_quantity(merged["stiffness"], "stiffness"),
            bolt_mass=parse_quantity(merged["bolt_mass"], "mass"),
            base_amplitude=parse_quantity(merged.get("base_amplitude", "0 m"), "length"),
            damping_ratio=None if ratio is None else float(ratio),
            damping_coefficient=None if coefficient is None else parse_quantity(coefficient, "damping"),
            label=str(merged.get("label", "")),
        )
    except KeyError as exc:
        raise ConfigError(f"attachment needs {exc.args[0]!r} (no default for it)") from None


def _attachment_index(ref, attachments) -> int:
    if isinstance(ref, int) and not isinstance(ref, bool):
        return ref
    for k, att in enumerate(attachments):
        if att.label and att.label == ref:
            return k
    raise ConfigError(f"excitation references unknown attachment {ref!r}")


def parse_excitation(spec: dict, attachments, length: float):
    kind = spec.get("kind", "actuator")
    frequency = parse_quantity(spec.get("frequency"), "frequency")
    if kind == "actuator":
        return ActuatorBase(frequency, _attachment_index(spec.get("attachment", 0), attachments))
    if kind == "force":
        return DirectForce(
            frequency,
            parse_position(spec.get("position"), length),
            parse_quantity(spec.get("amplitude"), "force"),
        )
    raise ConfigError(f"unknown excitation kind {kind!r}; use 'actuator' or 'force'")


@dataclass
class Document:
    """A parsed config file: the study plus the raw sections other commands read."""

    study: StudyConfig
    raw: dict = field(default_factory=dict)
    source: bytes = b""
    actuator_defaults: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        value = self.raw.get(name) or {}
        if not isinstance(value, dict):
            raise ConfigError(f"section {name!r} must be a mapping")
        return value

    def position(self, value) -> float:
        return parse_position(value, self.study.geometry.length)


def build_study(doc: dict) -> tuple[StudyConfig, dict]:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    material = parse_material(doc.get("material", "aluminum"))
    geometry = parse_geometry(doc.get("geometry", REFERENCE_GEOMETRY))
    L = geometry.length
    defaults = doc.get("actuator_defaults", REFERENCE_ACTUATOR) or {}
    attachments = tuple(parse_attachment(a, defaults, L) for a in doc.get("attachments", []) or [])
    excitations = tuple(parse_excitation(e, attachments, L) for e in doc.get("excitations", []) or [])
    mesh = doc.get("mesh", {}) or {}
    supports = doc.get("supports", {}) or {}
    gravity = doc.get("gravity")
    study = StudyConfig(
        material=material,
        geometry=geometry,
        attachments=attachments,
        excitations=excitations,
        element_count=int(mesh.get("elements", 30)),
        gravity=STANDARD_GRAVITY if gravity is None else _parse_gravity(gravity),
        pinned_positions=tuple(parse_position(x, L) for x in supports.get("pinned", []) or []),
        probe_positions=tuple(parse_position(x, L) for x in mesh.get("probes", []) or []),
    )
    return study, defaults


def _parse_gravity(value) -> float:
    m = re.match(r"^\s*([0-9.eE+-]+)\s*m/s\^?2\s*$", str(value))
    if not m:
        raise ConfigError(f"gravity must be written like '9.80665 m/s^2', got {value!r}")
    return float(m.group(1))


def load_config(path) -> Document:
    doc, raw = read_document(path)
    try:
        study, defaults = build_study(doc)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc
    return Document(study, doc, raw, defaults)


def reference_document(material: Optional[str] = None, elements: int = 30) -> Document:
    """The default bar: 12 in aluminum strip, reference actuator, 30 elements."""
    doc: dict[str, Any] = {
        "material": material or "aluminum",
        "geometry": dict(REFERENCE_GEOMETRY),
        "mesh": {"elements": elements},
        "actuator_defaults": dict(REFERENCE_ACTUATOR),
        "attachments": [{"label": "actuator", "position": "0 L"}],
    }
    study, defaults = build_study(doc)
    return Document(study, doc, json.dumps(doc, sort_keys=True).encode(), defaults)
