"""Acceptance gate.

One test per criterion (criteria 5 and 6 are split into their bullets).
Each test prints a PASS/FAIL line with the measured numbers, and the
terminal summary repeats the verdicts.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import sdof
from touchbar.cli import run
from touchbar.config import reference_document
from touchbar.errors import ResonanceSingularError
from touchbar.fem import assemble, build_system, constrain_pinned, generate_mesh
from touchbar.modal import analytical_pinned_frequencies, modes, undamped_frequencies_hz
from touchbar.model import ActuatorAttachment, ActuatorBase, DirectForce, StudyConfig, material_catalog
from touchbar.oracle import compare_trajectories, harmonic_forcing, newmark_integrate
from touchbar.response import (
    HarmonicExcitation,
    base_excitation_forces,
    complete_response,
    direct_force,
    peak_acceleration_field,
    steady_state,
)
from touchbar.sweep import (
    SweepSpec,
    bucket_fractions,
    dead_zones,
    nullification_union,
    peak_field,
    preset_configurations,
    quantile_summary,
    run_sweep,
    zone_measure,
)

PUBLISHED_ANALYTICAL_HZ = (24.8197, 99.2788, 223.3774, 397.1154, 620.4928)
MODE_LIMITS = (1e-6, 1e-5, 1e-5, 5e-5, 1e-4)


def report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def study():
    return reference_document().study


def _pinned(study, elements=30):
    L = study.geometry.length
    return replace(study, attachments=(), excitations=(), element_count=elements, pinned_positions=(0.0, L))


def _fe_frequencies(study):
    start = time.perf_counter()
    system = build_system(_pinned(study))
    fe = modes(system).natural_frequencies_hz()[:5]
    return system, fe, time.perf_counter() - start


def test_criterion_1_fe_matches_closed_form(study):
    system, fe, elapsed = _fe_frequencies(study)
    exact = np.array(analytical_pinned_frequencies(study.material, study.geometry, 5))
    rel = np.abs(fe - exact) / exact
    ok = system.mesh.dof_count == 62 and np.all(rel <= MODE_LIMITS) and elapsed < 1.0
    report("criterion 1", ok, f"rel errors {np.array2string(rel, precision=3)}, 62 DOF, {elapsed:.3f} s")


def test_criterion_2_published_frequencies(study):
    _, fe, elapsed = _fe_frequencies(study)
    rel = np.abs(fe - PUBLISHED_ANALYTICAL_HZ) / np.array(PUBLISHED_ANALYTICAL_HZ)
    ok = np.all(rel <= 2e-3) and elapsed < 1.0
    report("criterion 2", ok, f"rel deviation {np.array2string(rel, precision=4)}, {elapsed:.3f} s")


def test_criterion_3_analytical_vs_time_integration(study):
    start = time.perf_counter()
    L = study.geometry.length
    cfg = replace(
        _pinned(study, elements=10),
        excitations=(DirectForce(157.0, 0.1 * L, 2.0), DirectForce(179.0, 0.9 * L, 2.0)),
    )
    system = build_system(cfg)
    excitations = [direct_force(system, e.position, e.force_amplitude, e.frequency_hz) for e in cfg.excitations]
    numeric = newmark_integrate(system, harmonic_forcing(excitations, system.n), None, None, 1e-5, 0.5, 179.0)
    exact = complete_response(system, excitations, None, None, numeric.times)
    err, rms = compare_trajectories(exact, numeric, settle_time=0.1, dofs=system.translational_dofs())
    elapsed = time.perf_counter() - start
    ok = system.mesh.dof_count == 22 and err <= 0.01 and elapsed < 30
    report("criterion 3", ok, f"max rel error {err:.3e} (rms {rms:.2e}), {elapsed:.1f} s")


def test_criterion_4_sdof_closed_forms():
    def one(m, c, k, omega):
        exc = HarmonicExcitation(omega, np.array([1.0]), np.array([0.0]))
        ss = steady_state(sdof(m, c, k), [exc])
        return ss.cos_coeffs[0, 0], ss.sin_coeffs[0, 0]

    p1, q1 = one(1, 0, 1, 2.0)
    p2, q2 = one(1, 1, 1, 1.0)
    try:
        one(1, 0, 1, 1.0)
        raised = False
    except ResonanceSingularError:
        raised = True
    dev = max(abs(p1), abs(q1 + 1 / 3), abs(p2 + 1), abs(q2))
    report("criterion 4", dev <= 1e-12 and raised, f"max deviation {dev:.1e}, resonance raised: {raised}")


# criterion 5: property suite


@pytest.fixture(scope="module")
def dual(study):
    L = study.geometry.length
    t = study.attachments[0]
    cfg = replace(study, attachments=(replace(t, position=0.16 * L), replace(t, position=0.84 * L)))
    return cfg, build_system(cfg)


def test_criterion_5_response_properties(study, dual):
    cfg, system = dual
    a0, a1 = cfg.attachments
    e0, e1 = base_excitation_forces(system, a0, 170.0), base_excitation_forces(system, a1, 230.0)
    both, s0, s1 = steady_state(system, [e0, e1]), steady_state(system, [e0]), steady_state(system, [e1])
    sup = max(
        np.abs(both.cos_coeffs - np.vstack([s0.cos_coeffs, s1.cos_coeffs])).max(),
        np.abs(both.sin_coeffs - np.vstack([s0.sin_coeffs, s1.sin_coeffs])).max(),
    ) / np.abs(both.sin_coeffs).max()

    lin = 0.0
    for scale in (0.37, 3.0, 41.5):
        x = steady_state(system, [e0.scaled(scale)])
        ref = np.concatenate([s0.cos_coeffs, s0.sin_coeffs])
        got = np.concatenate([x.cos_coeffs, x.sin_coeffs])
        lin = max(lin, np.linalg.norm(got - scale * ref) / (scale * np.linalg.norm(ref)))
        pk = peak_acceleration_field(system, x).peaks_g
        pk0 = peak_acceleration_field(system, s0).peaks_g
        lin = max(lin, np.linalg.norm(pk - scale * pk0) / (scale * np.linalg.norm(pk0)))

    L = cfg.geometry.length
    t = cfg.attachments[0]
    mirror_cfg = replace(cfg, attachments=(replace(t, position=0.2 * L), replace(t, position=0.8 * L)))
    msys = build_system(mirror_cfg)
    mf = peak_acceleration_field(msys, steady_state(msys, [base_excitation_forces(msys, a, 205.0) for a in mirror_cfg.attachments]))
    sym = np.abs(mf.peaks_g - mf.peaks_g[::-1]).max() / mf.peaks_g.max()

    n = system.n
    j, k = system.translational_dofs()[[5, 20]]
    unit = [np.eye(n)[j], np.eye(n)[k]]
    ss = steady_state(system, [HarmonicExcitation(2 * math.pi * 190, u, np.zeros(n)) for u in unit])
    amp = np.hypot(ss.cos_coeffs, ss.sin_coeffs).max()
    rec = max(abs(ss.cos_coeffs[0, k] - ss.cos_coeffs[1, j]), abs(ss.sin_coeffs[0, k] - ss.sin_coeffs[1, j])) / amp

    modal = modes(system)
    t_end = 20.0 / np.abs(modal.eigenvalues.real).min()
    late = complete_response(system, [e0, e1], None, None, [t_end], modal=modal).displacements
    steady_only = both.displacement([t_end])
    longt = np.abs(late - steady_only).max() / np.abs(steady_only).max()

    ok = sup <= 1e-12 and lin <= 1e-12 and sym <= 1e-8 and rec <= 1e-10 and longt <= 1e-6
    report(
        "criterion 5 (response)",
        ok,
        f"superposition {sup:.1e}, linearity {lin:.1e}, mirror {sym:.1e}, reciprocity {rec:.1e}, long-time {longt:.1e}",
    )


def test_criterion_5_modal_properties(study, dual):
    _, system = dual
    result = modes(system)
    s = result.eigenvalues
    pairing = max(np.min(np.abs(s - np.conj(v))) / abs(v) for v in s[s.imag > 0])
    growth = s.real.max() / np.abs(s).max()

    pinned = build_system(_pinned(study))
    undamped = modes(pinned)
    cross = np.abs(undamped.natural_frequencies_hz()[:10] / undamped_frequencies_hz(pinned)[:10] - 1).max()
    zero_re = np.abs(undamped.eigenvalues.real).max() / np.abs(undamped.eigenvalues).max()

    mat, geom = study.material, study.geometry
    fixed = ActuatorAttachment(0.84 * geom.length, 16180.0, 0.005, damping_ratio=0.02)
    lowest = []
    for kb in (1e3, 5e3, 10e3, 16.18e3, 25e3, 50e3):
        moving = ActuatorAttachment(0.16 * geom.length, kb, 0.005, damping_coefficient=0.35977)
        sysk = build_system(StudyConfig(mat, geom, attachments=(fixed, moving), element_count=30))
        lowest.append(modes(sysk).damped_frequencies_hz.min())
    monotone = all(b >= a for a, b in zip(lowest, lowest[1:]))

    ok = pairing <= 1e-10 and growth <= 1e-8 and cross <= 1e-8 and zero_re <= 1e-8 and monotone
    report(
        "criterion 5 (modal)",
        ok,
        f"pairing {pairing:.1e}, max Re/|s| {growth:.1e}, eig vs eigh {cross:.1e}, "
        f"undamped Re {zero_re:.1e}, k_b ladder lowest Hz {np.round(lowest, 3).tolist()}",
    )


def test_criterion_5_mesh_convergence(study):
    mat = material_catalog("aluminum")
    geom = study.geometry
    exact = analytical_pinned_frequencies(mat, geom, 1)[0]
    errors = []
    for n_el in (4, 8, 16, 32):
        system = constrain_pinned(assemble(generate_mesh(geom.length, n_el), mat, geom), [0, n_el])
        errors.append(abs(undamped_frequencies_hz(system)[0] - exact) / exact)
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    report("criterion 5 (convergence)", orders.min() >= 3.5, f"observed orders {np.round(orders, 3).tolist()}")


def test_criterion_5_newmark_properties(study):
    system = build_system(_pinned(study, elements=10))
    d0 = 1e-5 * np.random.default_rng(11).standard_normal(system.n)
    period = 1.0 / undamped_frequencies_hz(system)[0]
    traj = newmark_integrate(system, harmonic_forcing([], system.n), d0, None, period / 200, 10 * period)
    K, M = system.stiffness, system.mass
    energy = 0.5 * (np.einsum("ti,ij,tj->t", traj.displacements, K, traj.displacements)
                    + np.einsum("ti,ij,tj->t", traj.velocities, M, traj.velocities))
    drift = np.abs(energy / energy[0] - 1).max()

    osc = sdof(1.0, 0.4, 4.0)
    wd = math.sqrt(4 - 0.04)
    exact = math.exp(-0.4) * (math.cos(2 * wd) + 0.2 / wd * math.sin(2 * wd))
    errors = []
    for dt in (0.01, 0.005, 0.0025):
        x = newmark_integrate(osc, harmonic_forcing([], 1), [1.0], [0.0], dt, 2.0).displacements[-1, 0]
        errors.append(abs(x - exact))
    order = np.log2(np.array(errors[:-1]) / np.array(errors[1:])).min()
    report("criterion 5 (Newmark)", drift <= 1e-3 and order >= 1.9, f"energy drift {drift:.1e}, order {order:.3f}")


# criterion 6: qualitative structure at the reference assumptions


@pytest.fixture(scope="module")
def preset_sweeps(study):
    L = study.geometry.length
    out = {}
    for case in ("dual", "triple"):
        spec = SweepSpec(study, position_sets=preset_configurations(case, L), probe_positions=(0.59 * L,))
        out[case] = run_sweep(spec)
    return out


def _medians(samples):
    q = quantile_summary(samples, "configuration")
    return np.array([q[i].median for i in sorted(q)])


def test_criterion_6_dual_median(preset_sweeps):
    med = _medians(preset_sweeps["dual"])
    report("criterion 6 (dual median)", int(np.argmax(med)) == 2, f"medians g by configuration {np.round(med, 2).tolist()}")


def test_criterion_6_dual_high_fraction(study, preset_sweeps):
    samples = preset_sweeps["dual"]
    x = 0.59 * study.geometry.length
    high = np.array([bucket_fractions(samples.where(configuration=i), x).fractions[2] for i in range(5)])
    report("criterion 6 (dual >5 g at 0.59L)", int(np.argmax(high)) == 2, f">5 g fractions {np.round(high, 3).tolist()}")


def test_criterion_6_triple_median(preset_sweeps):
    med = _medians(preset_sweeps["triple"])
    report("criterion 6 (triple median)", int(np.argmax(med)) == 0, f"medians g by configuration {np.round(med, 2).tolist()}")


def test_criterion_6_stiffness_ladder(study):
    L = study.geometry.length
    spec = SweepSpec(study, position_sets=[(0.16 * L, 0.84 * L)], stiffness_values=(10000.0, 16180.0, 25000.0))
    samples = run_sweep(spec)
    means = [float(samples.where(stiffness=k).peak_g.mean()) for k in spec.stiffness_values]
    ok = all(b >= a for a, b in zip(means, means[1:]))
    report("criterion 6 (stiffness ladder)", ok, f"spatial-mean peak g {np.round(means, 2).tolist()}")


def test_criterion_6_nullification(study):
    L = study.geometry.length
    t = study.attachments[0]
    atts = (replace(t, position=0.16 * L), replace(t, position=0.84 * L))
    threshold = 3.0
    fields = [
        peak_field(replace(study, attachments=atts, excitations=tuple(ActuatorBase(f, j) for j, f in enumerate(fs))))
        for fs in ((170.0, 200.0), (170.0, 230.0))
    ]
    single = [zone_measure(dead_zones(f, threshold)) / L for f in fields]
    union = zone_measure(nullification_union(fields, threshold)) / L
    report(
        "criterion 6 (nullification)",
        all(union < m for m in single),
        f"dead-zone measure / L at {threshold:g} g: sets {np.round(single, 4).tolist()}, union {union:.4f}",
    )


def test_criterion_7_sweep_byte_identical(tmp_path):
    base = ["sweep", "--preset", "dual", "--grid", "150:250:5"]
    codes = [
        run(base + ["--out", str(tmp_path / "w1a"), "--workers", "1"]),
        run(base + ["--out", str(tmp_path / "w1b"), "--workers", "1"]),
        run(base + ["--out", str(tmp_path / "w4"), "--workers", "4"]),
    ]
    blobs = [(tmp_path / d / "samples.csv").read_bytes() for d in ("w1a", "w1b", "w4")]
    same = blobs[0] == blobs[1] == blobs[2]
    records = blobs[0].count(b"\n") - 1
    ok = codes == [0, 0, 0] and same and records > 0
    report("criterion 7", ok, f"exit codes {codes}, {records} records, identical: {same}")
