import numpy as np
import pytest

from zkstrip.transverse import StripGeometry

ACCEPTANCE_LINES = []


def record(criterion: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append((criterion, ok, detail))


@pytest.fixture(scope="session")
def default_geom():
    return StripGeometry()


@pytest.fixture(scope="session")
def small_geom():
    return StripGeometry(K=4, L=20.0, Nx=64, Ny=16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {crit:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
