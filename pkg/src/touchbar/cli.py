"""Command line front end.

Exit status: 0 on success, 1 when a solver fails (resonance, eigensolver),
2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import Document, load_config, parse_position, reference_document
from .errors import ConfigError, SolverError
from .fem import build_system
from .io import RunManifest, digest, write_csv, write_field, write_json, write_samples
from .modal import analytical_pinned_frequencies, modes
from .model import ActuatorBase, material_catalog
from .oracle import compare_trajectories, harmonic_forcing, newmark_integrate
from .response import complete_response, excitations_from_config, peak_acceleration_field, steady_state
from .units import parse_quantity
from .sweep import (
    SweepSpec,
    bucket_fractions,
    dead_zones,
    nullification_union,
    parse_grid,
    peak_field,
    preset_configurations,
    quantile_summary,
    resolve_workers,
    run_sweep,
    zone_measure,
)

log = logging.getLogger("touchbar")

def _document(args) -> Document:
    if getattr(args, "config", None):
        doc = load_config(args.config)
    else:
        doc = reference_document(elements=getattr(args, "elements", None) or 30)
    study = doc.study
    if getattr(args, "material", None):
        study = replace(study, material=material_catalog(args.material))
    if getattr(args, "elements", None):
        study = replace(study, element_count=args.elements)
    doc.study = study
    return doc


def _positions(text: str, length: float) -> list[tuple[float, ...]]:
    return [tuple(parse_position(p.strip(), length) for p in group.split(",")) for group in text.split(";") if group.strip()]


def _tuples(text: str) -> list[tuple[float, ...]]:
    try:
        return [tuple(float(v) for v in group.split(",")) for group in text.split(";") if group.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse frequency tuples {text!r}") from exc


def cmd_validate(args) -> dict:
    doc = _document(args)
    study = doc.study
    L = study.geometry.length
    pinned = replace(study, attachments=(), excitations=(), pinned_positions=(0.0, L))
    t0 = time.perf_counter()
    system = build_system(pinned)
    fe = modes(system).natural_frequencies_hz()[: args.count]
    elapsed = time.perf_counter() - t0
    exact = analytical_pinned_frequencies(study.material, study.geometry, args.count)
    rows = []
    print(f"pinned-pinned {study.material.name} bar, {study.element_count} elements, "
          f"{system.mesh.dof_count} DOF before supports")
    print(f"{'mode':>4} {'analytical_hz':>14} {'fe_hz':>14} {'error_pct':>11}")
    for k, (a, f) in enumerate(zip(exact, fe), start=1):
        err = 100.0 * (f - a) / a
        rows.append({"mode": k, "analytical_hz": a, "fe_hz": float(f), "error_pct": err})
        print(f"{k:>4} {a:>14.4f} {f:>14.4f} {err:>11.6f}")
    print(f"solve time {elapsed:.3f} s")
    result = {"material": study.material.name, "elements": study.element_count, "modes": rows}
    if args.out:
        result["outputs"] = [str(write_json(Path(args.out) / "validate.json", result))]
    return result


def cmd_modes(args) -> dict:
    doc = _document(args)
    system = build_system(doc.study)
    result = modes(system)
    s = result.eigenvalues
    keep = np.flatnonzero(s.imag >= 0)[: args.count]
    print(f"{'mode':>4} {'freq_hz':>14} {'damping':>12} {'real':>14} {'imag':>14}")
    rows = []
    for j, k in enumerate(keep, start=1):
        rows.append((j, s[k].real, s[k].imag, result.damped_frequencies_hz[k], result.modal_damping[k]))
        print(f"{j:>4} {result.damped_frequencies_hz[k]:>14.4f} {result.modal_damping[k]:>12.5g} "
              f"{s[k].real:>14.6g} {s[k].imag:>14.6g}")
    out = {}
    if args.out:
        path = write_csv(Path(args.out) / "modes.csv", ("mode", "real", "imag", "frequency_hz", "damping_ratio"), rows)
        out["outputs"] = [str(path)]
    return out


def cmd_respond(args) -> dict:
    doc = _document(args)
    study = doc.study
    if not study.excitations:
        raise ConfigError("respond needs at least one excitation in the config")
    system = build_system(study)
    excitations = excitations_from_config(system, study)
    steady = steady_state(system, excitations)
    field = peak_acceleration_field(system, steady, study.gravity)
    zones = dead_zones(field, args.threshold)
    print(f"{len(excitations)} excitation(s), {system.n} free DOF")
    print(f"peak acceleration: min {field.peaks_g.min():.4g} g, max {field.peaks_g.max():.4g} g, "
          f"mean {field.peaks_g.mean():.4g} g")
    print(f"regions below {args.threshold:g} g: {len(zones)}")
    summary = {
        "frequencies_hz": [e.frequency_hz for e in excitations],
        "peak_g": {"min": field.peaks_g.min(), "max": field.peaks_g.max(), "mean": field.peaks_g.mean()},
        "dead_zones_m": zones,
        "threshold_g": args.threshold,
    }
    if args.oracle:
        oracle = doc.section("oracle")
        dt = parse_quantity(args.dt or oracle.get("dt", "1e-5 s"), "time")
        duration = parse_quantity(args.duration or oracle.get("duration", "0.5 s"), "time")
        settle = parse_quantity(args.settle or oracle.get("settle", "0.1 s"), "time")
        fmax = max(e.frequency_hz for e in excitations)
        numeric = newmark_integrate(system, harmonic_forcing(excitations, system.n), None, None, dt, duration, fmax)
        exact = complete_response(system, excitations, None, None, numeric.times, steady=steady)
        max_err, rms_err = compare_trajectories(exact, numeric, settle, system.translational_dofs())
        print(f"oracle: max relative error {max_err:.3e}, rms {rms_err:.3e} (t >= {settle:g} s)")
        summary["oracle"] = {"dt_s": dt, "duration_s": duration, "settle_s": settle, "max_rel_error": max_err, "rms_rel_error": rms_err}
    if args.out:
        out = Path(args.out)
        summary["outputs"] = [str(write_field(out / "field.csv", field)), str(out / "respond.json")]
        write_json(out / "respond.json", summary)
    return summary


def _sweep_spec(args, doc: Document) -> tuple[SweepSpec, float]:
    study = doc.study
    section = doc.section("sweep")
    L = study.geometry.length
    if not study.attachments:
        study = replace(study, attachments=reference_document().study.attachments)
    if args.positions:
        position_sets = _positions(args.positions, L)
    elif args.preset or "positions" not in section:
        position_sets = preset_configurations(args.preset or section.get("preset", "dual"), L)
    else:
        position_sets = [tuple(doc.position(p) for p in group) for group in section["positions"]]
    grid_text = args.grid or section.get("grid", "150:250:5")
    grid = parse_grid(str(grid_text))
    if args.stiffness:
        stiffness = tuple(float(v) for v in args.stiffness.split(","))
    else:
        stiffness = tuple(parse_quantity(v, "stiffness") for v in section.get("stiffness", []) or [])
    tuples = _tuples(args.tuples) if args.tuples else [tuple(float(f) for f in t) for t in section.get("frequency_tuples", []) or []]
    evaluation = doc.position(args.evaluation_position or section.get("evaluation_position", "0.59 L"))
    cross = not args.matched and bool(section.get("cross_product", True))
    spec = SweepSpec(
        base=study,
        position_sets=tuple(position_sets),
        frequency_grid=grid,
        stiffness_values=stiffness,
        cross_product=cross,
        frequency_tuples=tuple(tuples),
        probe_positions=(evaluation,),
    )
    return spec, evaluation


def cmd_sweep(args) -> dict:
    doc = _document(args)
    spec, evaluation = _sweep_spec(args, doc)
    workers = resolve_workers(args.workers)
    samples = run_sweep(spec, workers=workers)
    out = Path(args.out)
    outputs = [str(write_samples(out / "samples.csv", samples))]
    summary = {"records": len(samples), "cases": len(spec.cases()), "skipped": list(samples.skipped)}
    if len(samples):
        quant = quantile_summary(samples, "configuration")
        summary["quantiles_by_configuration"] = {
            str(i + 1): {"positions_m": spec.position_sets[i], **vars(q)} for i, q in sorted(quant.items())
        }
        buckets = {}
        for i in sorted(quant):
            b = bucket_fractions(samples.where(configuration=i), evaluation)
            buckets[str(i + 1)] = {"fractions": b.fractions, "counts": b.counts, "thresholds_g": b.thresholds_g}
        summary["buckets_at_evaluation_position"] = {"position_m": evaluation, "by_configuration": buckets}
        print(f"{'config':>6} {'median_g':>10} {'mean_g':>10} {'<1g':>7} {'1-5g':>7} {'>5g':>7}")
        for i in sorted(quant):
            fr = buckets[str(i + 1)]["fractions"]
            print(f"{i + 1:>6} {quant[i].median:>10.4g} {quant[i].mean:>10.4g} {fr[0]:>7.3f} {fr[1]:>7.3f} {fr[2]:>7.3f}")
    outputs.append(str(write_json(out / "summary.json", summary)))
    print(f"{len(samples)} records from {len(spec.cases())} cases ({len(samples.skipped)} skipped) -> {out}")
    summary["outputs"] = outputs
    return summary


def cmd_deadzones(args) -> dict:
    doc = _document(args)
    study = doc.study
    section = doc.section("deadzones")
    threshold = args.threshold if args.threshold is not None else float(section.get("threshold_g", 1.0))
    sets_text = args.frequency_sets
    if sets_text:
        sets = _tuples(sets_text)
    elif section.get("frequency_sets"):
        sets = [tuple(float(f) for f in s) for s in section["frequency_sets"]]
    else:
        sets = []
    configs = []
    if sets:
        if not study.attachments:
            raise ConfigError("frequency sets need attachments in the config")
        for s in sets:
            if len(s) != len(study.attachments):
                raise ConfigError(f"frequency set {s} does not match {len(study.attachments)} attachments")
            configs.append(replace(study, excitations=tuple(ActuatorBase(f, j) for j, f in enumerate(s))))
    else:
        if not study.excitations:
            raise ConfigError("deadzones needs excitations or frequency sets")
        configs.append(study)
        sets = [tuple(e.frequency_hz for e in study.excitations)]
    fields = [peak_field(c) for c in configs]
    report = {"threshold_g": threshold, "sets": []}
    out = Path(args.out) if args.out else None
    outputs = []
    for k, (s, f) in enumerate(zip(sets, fields), start=1):
        zones = dead_zones(f, threshold)
        report["sets"].append({"frequencies_hz": s, "dead_zones_m": zones, "measure_m": zone_measure(zones)})
        print(f"set {k} {s} Hz: {len(zones)} zone(s), total {zone_measure(zones):.4g} m")
        if out:
            outputs.append(str(write_field(out / f"field_set{k}.csv", f)))
    residual = nullification_union(fields, threshold)
    report["residual_dead_zones_m"] = residual
    report["residual_measure_m"] = zone_measure(residual)
    print(f"residual after switching between sets: {len(residual)} zone(s), total {zone_measure(residual):.4g} m")
    if out:
        outputs.append(str(write_json(out / "deadzones.json", report)))
        report["outputs"] = outputs
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="touchbar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required, help="JSON or YAML study file")
        p.add_argument("--material", help="override the material by catalog name")
        p.add_argument("--elements", type=int, help="override the element count")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("validate", help="pinned-pinned natural frequencies vs closed form")
    common(p)
    p.add_argument("--count", type=int, default=5)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("modes", help="damped modes of a configured bar")
    common(p)
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("respond", help="steady-state peak acceleration field")
    common(p, config_required=True)
    p.add_argument("--threshold", type=float, default=1.0, help="dead-zone threshold in g")
    p.add_argument("--oracle", action="store_true", help="cross-check against direct time integration")
    p.add_argument("--dt")
    p.add_argument("--duration")
    p.add_argument("--settle")
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("sweep", help="actuator placement / frequency / stiffness study")
    common(p)
    p.add_argument("--preset", choices=("single", "dual", "triple"))
    p.add_argument("--positions", help="sets separated by ';', e.g. '0.16L,0.84L;0.33L,0.67L'")
    p.add_argument("--grid", help="start:stop:step in Hz, or a comma list")
    p.add_argument("--stiffness", help="comma list in N/m")
    p.add_argument("--matched", action="store_true", help="all actuators share one frequency per case")
    p.add_argument("--tuples", help="explicit frequency assignments, e.g. '179,157;170,230'")
    p.add_argument("--evaluation-position", help="bucket statistics location, e.g. '0.59L'")
    p.add_argument("--workers", type=int, help="worker processes (default: $TOUCHBAR_WORKERS or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("deadzones", help="sub-threshold regions and their nullification")
    common(p, config_required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--frequency-sets", help="one frequency per attachment, sets separated by ';'")
    p.set_defaults(func=cmd_deadzones)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep" and not args.out:
        print("touchbar sweep: --out is required", file=sys.stderr)
        return 2
    started = time.perf_counter()
    try:
        doc_bytes = Path(args.config).read_bytes() if getattr(args, "config", None) and Path(args.config).is_file() else b""
        result = args.func(args)
    except ConfigError as exc:
        print(f"touchbar {args.command}: configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"touchbar {args.command}: solver error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        options = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "workers", "verbose")}
        manifest = RunManifest(
            config_digest=digest(doc_bytes + repr(options).encode()),
            subcommand=args.command,
            outputs=list((result or {}).get("outputs", [])),
            wall_time_s=time.perf_counter() - started,
        )
        manifest.write(args.out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
