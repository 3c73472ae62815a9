from dataclasses import replace

import numpy as np
import pytest

from touchbar.config import reference_document
from touchbar.fem import TRANSLATION, AssembledSystem, Mesh, build_system


def sdof(m, c, k):
    """One-DOF system wrapped as an AssembledSystem."""
    mesh = Mesh(np.array([0.0, 1.0]), {0: 0})
    return AssembledSystem(np.array([[m]], float), np.array([[c]], float), np.array([[k]], float), mesh, ((0, TRANSLATION),))


@pytest.fixture
def reference_study():
    """12 in aluminium bar, reference actuator template at x = 0, 30 elements."""
    return reference_document().study


@pytest.fixture
def template(reference_study):
    return reference_study.attachments[0]


@pytest.fixture
def dual_study(reference_study, template):
    L = reference_study.geometry.length
    atts = (replace(template, position=0.16 * L), replace(template, position=0.84 * L))
    return replace(reference_study, attachments=atts, element_count=12)


@pytest.fixture
def dual_system(dual_study):
    return build_system(dual_study)


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid.split("::", 1)[1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
