"""Parametric studies over actuator placement, drive frequency and stiffness.

A sweep rebuilds the bar for every actuator position set and stiffness,
drives it with every frequency assignment, and records the peak
acceleration (in g) at every free translational node.  Cases are
independent, so they may be farmed out to worker processes; results are
merged by case id, which keeps the output identical for any worker count.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, GridMismatchError, SolverError
from .fem import build_system
from .model import ActuatorAttachment, StudyConfig
from .response import PeakAccelerationField, base_excitation_forces, peak_amplitudes, steady_state

log = logging.getLogger(__name__)

HAPTIC_BAND_HZ = (150.0, 250.0)
DEFAULT_STEP_HZ = 5.0
WORKERS_ENV = "TOUCHBAR_WORKERS"

_PRESETS = {
    "single": [(0.0,), (0.03,), (0.16,), (0.33,), (0.49,)],
    "dual": [(0.0, 1.0), (0.03, 0.97), (0.16, 0.84), (0.33, 0.67), (0.49, 0.51)],
    "triple": [
        (0.0, 0.49, 1.0),
        (0.03, 0.49, 0.97),
        (0.16, 0.49, 0.84),
        (0.33, 0.49, 0.67),
        (0.43, 0.49, 0.57),
    ],
}


def preset_configurations(case: str, length: float = 1.0) -> list[tuple[float, ...]]:
    """Tabulated actuator layouts, as positions scaled by ``length``."""
    try:
        fractions = _PRESETS[case]
    except KeyError:
        raise ConfigError(f"unknown preset {case!r}; choose from {sorted(_PRESETS)}") from None
    return [tuple(f * length for f in row) for row in fractions]


def frequency_grid(start: float = HAPTIC_BAND_HZ[0], stop: float = HAPTIC_BAND_HZ[1], step: float = DEFAULT_STEP_HZ) -> tuple[float, ...]:
    """Inclusive grid ``start, start + step, ..., stop``."""
    if not (start > 0 and stop >= start and step > 0):
        raise ConfigError(f"invalid frequency grid {start}:{stop}:{step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(start + k * step) for k in range(count))


def parse_grid(text: str) -> tuple[float, ...]:
    """``"150:250:5"`` or a comma list ``"157,179"``."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            return frequency_grid(start, stop, step)
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse frequency grid {text!r}") from exc


@dataclass(frozen=True)
class SweepSpec:
    """Axes of a parametric study.

    ``base`` supplies material, geometry, mesh density and, through its
    first attachment, the actuator template (stiffness, bolt mass, damping,
    base amplitude).  With ``cross_product`` every actuator takes every
    grid frequency independently; otherwise all actuators share one
    frequency per case, or ``frequency_tuples`` lists the assignments.
    """

    base: StudyConfig
    position_sets: tuple = ()
    frequency_grid: tuple = field(default_factory=frequency_grid)
    stiffness_values: tuple = ()
    cross_product: bool = True
    frequency_tuples: tuple = ()
    probe_positions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "position_sets", tuple(tuple(float(x) for x in s) for s in self.position_sets))
        object.__setattr__(self, "frequency_grid", tuple(float(f) for f in self.frequency_grid))
        object.__setattr__(self, "stiffness_values", tuple(float(k) for k in self.stiffness_values))
        object.__setattr__(self, "frequency_tuples", tuple(tuple(float(f) for f in t) for t in self.frequency_tuples))
        object.__setattr__(self, "probe_positions", tuple(float(x) for x in self.probe_positions))
        if not self.base.attachments:
            raise ConfigError("sweep base config needs one attachment as the actuator template")
        if any(not f > 0 for f in self.frequency_grid):
            raise ConfigError("frequency grid values must be positive")
        if any(not k >= 0 for k in self.stiffness_values):
            raise ConfigError("stiffness values must be nonnegative")
        length = self.base.geometry.length
        for positions in self.position_sets:
            if not positions:
                raise ConfigError("empty actuator position set")
            if any(not 0 <= x <= length for x in positions):
                raise ConfigError(f"actuator positions {positions} fall outside the bar")
        for t in self.frequency_tuples:
            if any(not f > 0 for f in t):
                raise ConfigError("frequency tuples must hold positive values")

    @property
    def template(self) -> ActuatorAttachment:
        return self.base.attachments[0]

    def stiffness_axis(self) -> tuple[float, ...]:
        return self.stiffness_values or (self.template.stiffness,)

    def assignments(self, actuator_count: int) -> list[tuple[float, ...]]:
        if self.frequency_tuples:
            bad = [t for t in self.frequency_tuples if len(t) != actuator_count]
            if bad:
                raise ConfigError(f"frequency tuple {bad[0]} does not match {actuator_count} actuators")
            return list(self.frequency_tuples)
        if self.cross_product:
            return list(itertools.product(self.frequency_grid, repeat=actuator_count))
        return [(f,) * actuator_count for f in self.frequency_grid]

    def cases(self) -> list[tuple[int, int, tuple, tuple, float]]:
        """``(case_id, position_set_index, positions, frequencies, stiffness)`` in run order."""
        out = []
        for i, positions in enumerate(self.position_sets):
            for freqs in self.assignments(len(positions)):
                for k in self.stiffness_axis():
                    out.append((len(out), i, positions, freqs, k))
        return out


@dataclass(frozen=True, eq=False)
class SampleSet:
    """One record per (case, node).

    ``cases`` holds ``(case_id, position_set_index, positions, frequencies,
    stiffness)``; the record arrays index into it through ``case_index``.
    """

    cases: tuple
    case_index: np.ndarray
    position_m: np.ndarray
    peak_g: np.ndarray
    skipped: tuple = ()

    def __len__(self) -> int:
        return len(self.peak_g)

    @classmethod
    def empty(cls) -> "SampleSet":
        return cls((), np.zeros(0, dtype=int), np.zeros(0), np.zeros(0))

    def rows(self):
        """Yield ``(case_id, positions, frequencies, stiffness, position_m, peak_g)``."""
        for ci, x, pk in zip(self.case_index, self.position_m, self.peak_g):
            case_id, _, positions, freqs, k = self.cases[ci]
            yield case_id, positions, freqs, k, float(x), float(pk)

    def group_keys(self, group_by: str) -> list:
        slot = {"configuration": 1, "positions": 2, "frequencies": 3, "stiffness": 4, "case": 0}
        if group_by not in slot:
            raise ConfigError(f"cannot group by {group_by!r}; choose from {sorted(slot)}")
        j = slot[group_by]
        return [self.cases[ci][j] for ci in self.case_index]

    def subset(self, mask) -> "SampleSet":
        mask = np.asarray(mask, dtype=bool)
        return SampleSet(self.cases, self.case_index[mask], self.position_m[mask], self.peak_g[mask], self.skipped)

    def where(self, **criteria) -> "SampleSet":
        """Records whose case matches, e.g. ``where(configuration=2)``."""
        mask = np.ones(len(self), dtype=bool)
        for key, value in criteria.items():
            keys = self.group_keys(key)
            mask &= np.array([k == value for k in keys], dtype=bool)
        return self.subset(mask)


def _config_for(base: StudyConfig, template: ActuatorAttachment, positions, stiffness: float, probes=()) -> StudyConfig:
    attachments = tuple(
        replace(template, position=x, stiffness=stiffness, label=f"actuator{j + 1}") for j, x in enumerate(positions)
    )
    return replace(base, attachments=attachments, excitations=(), probe_positions=tuple(base.probe_positions) + tuple(probes))


def _run_group(args):
    """Solve every frequency assignment for one (position set, stiffness) pair."""
    base, template, positions, stiffness, probes, work = args
    cfg = _config_for(base, template, positions, stiffness, probes)
    system = build_system(cfg)
    dofs = system.translational_dofs()
    node_x = system.translational_positions()
    rows: dict = {}
    failures: dict = {}
    for j, att in enumerate(cfg.attachments):
        for f in sorted({freqs[j] for _, freqs in work}):
            try:
                steady = steady_state(system, [base_excitation_forces(system, att, f)])
                rows[j, f] = peak_amplitudes(steady)[0][dofs]
            except SolverError as exc:
                failures[j, f] = str(exc)
    out = []
    for case_id, freqs in work:
        missing = [failures[j, f] for j, f in enumerate(freqs) if (j, f) in failures]
        if missing:
            out.append((case_id, None, missing[0]))
            continue
        total = np.zeros(dofs.size)
        for j, f in enumerate(freqs):
            total = total + rows[j, f]
        out.append((case_id, total / base.gravity, None))
    return node_x, out


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(workers))


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SampleSet:
    cases = spec.cases()
    if not cases:
        return SampleSet.empty()
    groups: dict = {}
    for case_id, _, positions, freqs, k in cases:
        groups.setdefault((positions, k), []).append((case_id, freqs))
    jobs = [(spec.base, spec.template, positions, k, spec.probe_positions, work) for (positions, k), work in groups.items()]

    workers = resolve_workers(workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_run_group, jobs))
    else:
        results = [_run_group(job) for job in jobs]

    by_case = {}
    for node_x, out in results:
        for case_id, peaks, reason in out:
            by_case[case_id] = (node_x, peaks, reason)
    case_index, xs, peaks_all, skipped = [], [], [], []
    for case_id in range(len(cases)):
        node_x, peaks, reason = by_case[case_id]
        if peaks is None:
            log.warning("case %d skipped: %s", case_id, reason)
            skipped.append((case_id, reason))
            continue
        case_index.append(np.full(node_x.size, case_id))
        xs.append(node_x)
        peaks_all.append(peaks)
    if not xs:
        return SampleSet(tuple(cases), np.zeros(0, dtype=int), np.zeros(0), np.zeros(0), tuple(skipped))
    return SampleSet(
        tuple(cases),
        np.concatenate(case_index).astype(int),
        np.concatenate(xs),
        np.concatenate(peaks_all),
        tuple(skipped),
    )


def peak_field(config: StudyConfig) -> PeakAccelerationField:
    """Peak field of a fully specified configuration (attachments + excitations)."""
    from .response import excitations_from_config, peak_acceleration_field

    system = build_system(config)
    steady = steady_state(system, excitations_from_config(system, config))
    return peak_acceleration_field(system, steady, config.gravity)


@dataclass(frozen=True)
class QuantileSummary:
    count: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float


def quantile_summary(samples: SampleSet, group_by: str = "configuration") -> dict:
    """Five-number summary plus mean per group (linear-interpolation quantiles)."""
    keys = samples.group_keys(group_by)
    groups: dict = {}
    for key, value in zip(keys, samples.peak_g):
        groups.setdefault(key, []).append(value)
    if not groups:
        raise ConfigError("no samples to summarize")
    out = {}
    for key, values in groups.items():
        v = np.asarray(values)
        q = np.quantile(v, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
        out[key] = QuantileSummary(v.size, *(float(x) for x in q), float(v.mean()))
    return out


@dataclass(frozen=True)
class BucketSummary:
    """Share of peaks ``<= low``, in ``(low, high]`` and ``> high`` (g)."""

    counts: tuple
    thresholds_g: tuple = (1.0, 5.0)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def fractions(self) -> tuple:
        total = self.total
        if total == 0:
            return (0.0, 0.0, 0.0)
        low, mid = self.counts[0] / total, self.counts[1] / total
        return (low, mid, 1.0 - low - mid)


def records_at(samples: SampleSet, evaluation_position: float) -> SampleSet:
    """Per case, the record at the node nearest ``evaluation_position``.

    A node qualifies only if it lies within half the local element length.
    """
    keep = np.zeros(len(samples), dtype=bool)
    for case_id in np.unique(samples.case_index):
        idx = np.flatnonzero(samples.case_index == case_id)
        x = samples.position_m[idx]
        j = int(np.argmin(np.abs(x - evaluation_position)))
        neighbours = [abs(x[j] - x[m]) for m in (j - 1, j + 1) if 0 <= m < x.size]
        half = 0.5 * min(neighbours) if neighbours else np.inf
        if abs(x[j] - evaluation_position) <= half + 1e-12 * max(1.0, abs(evaluation_position)):
            keep[idx[j]] = True
    return samples.subset(keep)


def bucket_fractions(samples: SampleSet, evaluation_position: float, thresholds_g=(1.0, 5.0)) -> BucketSummary:
    low, high = thresholds_g
    at = records_at(samples, evaluation_position)
    if len(at) == 0:
        raise ConfigError(f"no samples near {evaluation_position} m")
    p = at.peak_g
    below = int(np.count_nonzero(p <= low))
    above = int(np.count_nonzero(p > high))
    return BucketSummary((below, int(p.size) - below - above, above), (float(low), float(high)))


def dead_zones(field: PeakAccelerationField, threshold_g: float = 1.0) -> list[tuple[float, float]]:
    """Maximal intervals where the linearly interpolated peak is below threshold."""
    x = np.asarray(field.positions, dtype=float)
    y = np.asarray(field.peaks_g, dtype=float)
    if x.size == 0:
        raise ConfigError("empty peak field")
    below = y < threshold_g

    def crossing(a: int, b: int) -> float:
        return float(x[a] + (threshold_g - y[a]) / (y[b] - y[a]) * (x[b] - x[a]))

    zones = []
    k = 0
    while k < x.size:
        if not below[k]:
            k += 1
            continue
        start = float(x[0]) if k == 0 else crossing(k - 1, k)
        j = k
        while j + 1 < x.size and below[j + 1]:
            j += 1
        end = float(x[-1]) if j == x.size - 1 else crossing(j, j + 1)
        zones.append((start, end))
        k = j + 1
    return zones


def zone_measure(zones) -> float:
    return float(sum(b - a for a, b in zones))


def nullification_union(fields: Sequence[PeakAccelerationField], threshold_g: float = 1.0) -> list[tuple[float, float]]:
    """Dead zones left when switching between the given excitation sets.

    Uses the pointwise maximum of the fields, i.e. the best any set can do.
    """
    if not fields:
        raise ConfigError("need at least one field")
    x0 = np.asarray(fields[0].positions)
    for f in fields[1:]:
        if np.shape(f.positions) != x0.shape or not np.array_equal(np.asarray(f.positions), x0):
            raise GridMismatchError("fields are sampled on different position grids")
    envelope = np.max(np.vstack([f.peaks_g for f in fields]), axis=0)
    return dead_zones(PeakAccelerationField(x0, envelope, fields[0].gravity), threshold_g)
