import numpy as np
import pytest

from bcspherical import numfield as nf


def random_matrix(rng, q, d, scale=1.0):
    return nf.from_real_coords(scale * rng.standard_normal(d * q * q), q, d)


def random_unitary(rng, q, d):
    Q, R = np.linalg.qr(random_matrix(rng, q, d))
    if d == 1:
        return Q * np.sign(np.diag(R))
    return Q


def random_ball_point(rng, q, d, radius=0.9):
    """A matrix with operator norm ``radius * U`` for U uniform on (0, 1)."""
    w = random_matrix(rng, q, d)
    s = np.linalg.norm(w, 2)
    return w * (radius * rng.uniform(0.05, 1.0) / s)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def emit(name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
