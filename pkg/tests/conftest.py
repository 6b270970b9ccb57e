"""Shared fixtures for sepscope tests."""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Ensure project root is in path
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

# isolated_settings is function-scoped and autouse
settings.register_profile(
    "sepscope",
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("sepscope")

from sepscope.config import reset_settings
from sepscope.criteria import DensityMatrix
from sepscope.matkernel import BipartiteIndex


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Fresh settings per test, no run logs, no env leakage."""
    for name in ("SEPSCOPE_CONFIG", "SEPSCOPE_THREADS", "SEPSCOPE_LOG_DIR"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("SEPSCOPE_RUN_LOGS", "0")
    monkeypatch.chdir(tmp_path)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def qubits():
    return BipartiteIndex(2, 2)


@pytest.fixture
def bell(qubits):
    """(|00> + |11>)/sqrt(2) as a state."""
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return DensityMatrix.from_matrix(np.outer(psi, psi.conj()), qubits)


@pytest.fixture
def maximally_mixed(qubits):
    return DensityMatrix.from_matrix(np.eye(4) / 4, qubits)


@pytest.fixture
def data_dir():
    return Path(__file__).parent / "data"
