import numpy as np
import pytest
from pathlib import Path

from kreinext.services.cayley import PartialOperator
from kreinext.services.extensions import parametrize
from kreinext.services.linalg import Subspace
from kreinext.shared import DEFAULT_TOLERANCE

FIXTURES = Path(__file__).parent / "fixtures"

# Reference problem: T e1 = (0, c) on dom(T) = span{e1} in C^2, so A = 0 and Gamma_2 = c.
C = 1 / np.sqrt(2)
SQRT2 = np.sqrt(2)


@pytest.fixture
def tol():
    return DEFAULT_TOLERANCE


@pytest.fixture
def ref_T():
    e1 = np.array([[1.0], [0.0]], dtype=complex)
    return PartialOperator(2, Subspace(2, e1), np.array([[0.0], [C]], dtype=complex))


@pytest.fixture
def ref_S():
    h = np.array([[1.0], [C]], dtype=complex) / np.sqrt(1.5)
    Sh = np.array([[1.0], [-C]], dtype=complex) / np.sqrt(1.5)
    return PartialOperator(2, Subspace(2, h), Sh)


@pytest.fixture
def ref_param(ref_T, tol):
    return parametrize(ref_T, tol)


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("KREINEXT_TOLERANCE_PROFILE", "KREINEXT_LOG_LEVEL", "KREINEXT_WORKERS"):
        monkeypatch.delenv(name, raising=False)
