import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qst4.frames import mub_frame, vinzant_frame

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
unit_interval = st.floats(-1, 1, allow_nan=False, allow_infinity=False)

# 16 Cholesky parameters, kept away from the all-zero point
cholesky_params = arrays(np.float64, 16, elements=unit_interval).filter(
    lambda t: float(t @ t) > 1e-6
)
complex_2x2 = arrays(np.float64, (2, 2, 2), elements=finite).map(lambda a: a[0] + 1j * a[1])


def _unit(a):
    v = a[0] + 1j * a[1]
    return v / np.linalg.norm(v)


unit_vec4 = arrays(np.float64, (2, 4), elements=unit_interval).filter(
    lambda a: np.linalg.norm(a) > 1e-3
).map(_unit)


def random_density(rng, rank=4):
    a = rng.normal(size=(rank, 4)) + 1j * rng.normal(size=(rank, 4))
    rho = a.conj().T @ a
    return rho / np.trace(rho).real


def random_state(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


@pytest.fixture(scope="session")
def mub():
    return mub_frame()


@pytest.fixture(scope="session")
def vinzant():
    return vinzant_frame()


@pytest.fixture(params=["mub20", "vinzant11"], scope="session")
def frame(request):
    return mub_frame() if request.param == "mub20" else vinzant_frame()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
