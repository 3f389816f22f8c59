import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from binghamq.tensors import IDENTITY

settings.register_profile(
    "repo",
    max_examples=30,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

LO, HI = -1.0 / 3.0, 2.0 / 3.0


def rotation_from_angles(a, b, c):
    """ZYZ Euler rotation."""
    def rz(t):
        return np.array([[np.cos(t), -np.sin(t), 0.0], [np.sin(t), np.cos(t), 0.0], [0.0, 0.0, 1.0]])

    def ry(t):
        return np.array([[np.cos(t), 0.0, np.sin(t)], [0.0, 1.0, 0.0], [-np.sin(t), 0.0, np.cos(t)]])

    return rz(a) @ ry(b) @ rz(c)


angles = st.tuples(*(st.floats(0.0, 2 * np.pi, allow_nan=False) for _ in range(3)))


@st.composite
def admissible_q(draw, margin=0.02):
    lo, hi = LO + margin, HI - margin
    l1 = draw(st.floats(lo, min(hi, -2.0 * lo)))
    l2 = draw(st.floats(max(lo, -hi - l1), min(hi, -lo - l1)))
    lam = np.array([l1, l2, -l1 - l2])
    r = rotation_from_angles(*draw(angles))
    return r @ np.diag(lam) @ r.T


@st.composite
def traceless_sym(draw, scale=1.0):
    v = draw(st.lists(st.floats(-scale, scale), min_size=5, max_size=5))
    a = np.zeros((3, 3))
    a[0, 0], a[1, 1], a[0, 1], a[0, 2], a[1, 2] = v
    a = a + a.T - np.diag(np.diag(a))
    return a - np.trace(a) / 3.0 * IDENTITY


@st.composite
def matrix3(draw, scale=1.0):
    v = draw(st.lists(st.floats(-scale, scale), min_size=9, max_size=9))
    return np.array(v).reshape(3, 3)


unit_vectors = angles.map(lambda t: rotation_from_angles(*t)[:, 2])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance summary ------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
