import csv
import json

import pytest

from touchbar.cli import run
from touchbar.config import load_config
from touchbar.errors import ConfigError
from touchbar.io import SAMPLES_HEADER
from touchbar.model import ActuatorBase, DirectForce

FIG2 = """
material: aluminum
geometry: {length: 12 in, width: 0.984 in, thickness: 0.03937 in}
mesh: {elements: 10}
supports: {pinned: [0 L, 1 L]}
excitations:
  - {kind: force, position: 0.1 L, amplitude: 2 N, frequency: 157 Hz}
  - {kind: force, position: 0.9 L, amplitude: 2 N, frequency: 179 Hz}
oracle: {dt: 1e-5 s, duration: 0.05 s, settle: 0.01 s}
"""

DUAL = {
    "material": "aluminum",
    "geometry": {"length": "12 in", "width": "0.984 in", "thickness": "0.03937 in"},
    "mesh": {"elements": 12},
    "attachments": [{"label": "left", "position": "0.16 L"}, {"label": "right", "position": "0.84 L"}],
    "excitations": [
        {"attachment": "left", "frequency": "170 Hz"},
        {"attachment": "right", "frequency": "230 Hz"},
    ],
    "deadzones": {"threshold_g": 3, "frequency_sets": [[170, 200], [170, 230]]},
}


@pytest.fixture
def fig2(tmp_path):
    path = tmp_path / "fig2.yaml"
    path.write_text(FIG2)
    return path


@pytest.fixture
def dual(tmp_path):
    path = tmp_path / "dual.json"
    path.write_text(json.dumps(DUAL))
    return path


def test_load_yaml(fig2):
    doc = load_config(fig2)
    study = doc.study
    assert study.geometry.length == 0.3048
    assert study.pinned_positions == (0.0, 0.3048)
    assert all(isinstance(e, DirectForce) for e in study.excitations)
    assert study.excitations[0].position == pytest.approx(0.03048)


def test_load_json_with_labels(dual):
    study = load_config(dual).study
    assert study.attachments[0].stiffness == 16180.0
    assert study.attachments[1].bolt_mass == 0.005
    assert study.excitations == (ActuatorBase(170.0, 0), ActuatorBase(230.0, 1))


@pytest.mark.parametrize(
    "patch",
    [
        {"material": "unobtainium"},
        {"geometry": {"length": "12 in", "width": "1 in"}},
        {"attachments": [{"position": "13 in"}]},
        {"excitations": [{"attachment": "middle", "frequency": "200 Hz"}]},
        {"gravity": "9.8"},
    ],
)
def test_bad_configs(tmp_path, patch):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**DUAL, **patch}))
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_config_exit_code(tmp_path, capsys):
    assert run(["respond", "--config", str(tmp_path / "nope.yaml")]) == 2
    assert "nope.yaml" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert run(["sweep", "--preset", "dual"]) == 2
    assert run(["frobnicate"]) == 2
    assert run(["sweep", "--preset", "quad", "--out", "x"]) == 2


def test_validate(tmp_path, capsys):
    assert run(["validate", "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "24.8" in text
    report = json.loads((tmp_path / "validate.json").read_text())
    assert len(report["modes"]) == 5
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["subcommand"] == "validate"
    assert len(manifest["config_digest"]) == 64


def test_respond_with_oracle(fig2, tmp_path):
    assert run(["respond", "--config", str(fig2), "--oracle", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "respond.json").read_text())
    assert summary["frequencies_hz"] == pytest.approx([157.0, 179.0])
    assert summary["oracle"]["max_rel_error"] < 0.05
    rows = list(csv.reader((tmp_path / "field.csv").open()))
    assert rows[0] == ["position_m", "peak_g"]
    assert len(rows) == 1 + 9


def test_resonance_exit_code(tmp_path, capsys):
    undamped = {**DUAL, "actuator_defaults": {"stiffness": "16.18 kN/m", "bolt_mass": "5 g",
                                              "damping_coefficient": "0 N*s/m", "base_amplitude": "0.04125 mm"}}
    path = tmp_path / "undamped.json"
    path.write_text(json.dumps(undamped))
    assert run(["modes", "--config", str(path), "--count", "3"]) == 0
    out = capsys.readouterr().out
    first = float(out.splitlines()[1].split()[1])
    undamped["excitations"] = [{"attachment": "left", "frequency": f"{first!r} Hz"}]
    path.write_text(json.dumps(undamped))
    assert run(["respond", "--config", str(path)]) == 1


def test_deadzones(dual, tmp_path):
    assert run(["deadzones", "--config", str(dual), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "deadzones.json").read_text())
    assert report["threshold_g"] == 3
    assert len(report["sets"]) == 2
    assert report["residual_measure_m"] <= min(s["measure_m"] for s in report["sets"])


def test_sweep_outputs_and_determinism(tmp_path):
    args = ["sweep", "--preset", "dual", "--grid", "150:250:25", "--elements", "12"]
    assert run(args + ["--out", str(tmp_path / "a"), "--workers", "1"]) == 0
    assert run(args + ["--out", str(tmp_path / "b"), "--workers", "3"]) == 0
    a = (tmp_path / "a" / "samples.csv").read_bytes()
    assert a == (tmp_path / "b" / "samples.csv").read_bytes()
    rows = list(csv.reader(a.decode().splitlines()))
    assert tuple(rows[0]) == SAMPLES_HEADER
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["cases"] == 5 * 25
    assert summary["records"] == len(rows) - 1
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["outputs"][0].endswith("samples.csv")
