import json
from pathlib import Path

import pytest
from hypothesis import settings

from spmsm_diag.config import load_scenario
from spmsm_diag.fault_model import Healthy
from spmsm_diag.motor_core import MotorSpec
from spmsm_diag.synthesis import SimConfig, synthesize_waveforms

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = Path(__file__).resolve().parent / "fixtures"
MATRIX = ROOT / "scenarios" / "default_matrix.json"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def motor():
    return MotorSpec()


@pytest.fixture(scope="session")
def healthy_set(motor):
    return synthesize_waveforms(motor, Healthy(), SimConfig())


@pytest.fixture(scope="session")
def matrix_config():
    return load_scenario(MATRIX)


@pytest.fixture(scope="session")
def matrix_sets(matrix_config):
    """Waveform sets of the default eight-scenario matrix, keyed by name."""
    cfg = matrix_config
    return {s.name: synthesize_waveforms(cfg.motor, s.fault, cfg.sim) for s in cfg.scenarios}


@pytest.fixture(scope="session")
def reference_table_path():
    return FIXTURES / "reference_harmonics.csv"


def matrix_json():
    return json.loads(MATRIX.read_text())


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
