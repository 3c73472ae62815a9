"""Bit-stable CSV/JSON writers and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

SAMPLES_HEADER = ("case_id", "positions", "frequencies_hz", "stiffness_n_per_m", "position_m", "peak_g")
FIELD_HEADER = ("position_m", "peak_g")


def fmt(value) -> str:
    """17 significant digits: always parses back to the same double."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def fmt_tuple(values) -> str:
    return ";".join(fmt(v) for v in values)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def write_samples(path, samples) -> Path:
    rows = (
        (case_id, fmt_tuple(positions), fmt_tuple(freqs), k, x, peak)
        for case_id, positions, freqs, k, x, peak in samples.rows()
    )
    return write_csv(path, SAMPLES_HEADER, rows)


def write_field(path, field) -> Path:
    return write_csv(path, FIELD_HEADER, zip(field.positions, field.peaks_g))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return _plain(asdict(obj))
    return obj


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="ascii")
    return path


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunManifest:
    config_digest: str
    subcommand: str
    outputs: list = field(default_factory=list)
    wall_time_s: float = 0.0
    tool_version: str = __version__
    started: float = field(default_factory=time.time)

    def write(self, directory) -> Path:
        data = asdict(self)
        data.pop("started")
        return write_json(Path(directory) / "manifest.json", data)
