import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sfcalc.quat import ImaginaryUnit, Quaternion

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


@st.composite
def quaternions(draw, elements=finite):
    return Quaternion(draw(elements), draw(elements), draw(elements), draw(elements))


@st.composite
def nonzero_quaternions(draw):
    q = draw(quaternions())
    if q.norm() < 1e-3:
        q = q + 1.0
    return q


@st.composite
def units(draw):
    v = [draw(st.floats(min_value=-1.0, max_value=1.0)) for _ in range(3)]
    if np.linalg.norm(v) < 1e-2:
        v = [0.0, 0.0, 1.0]
    return ImaginaryUnit(*v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def cex_matrix():
    from sfcalc.qlinalg import QMatrix

    h = 0.5
    return QMatrix([
        [[0, -h, 0, 0], [h, 0, 0, 0]],
        [[-h, 0, 0, 0], [0, -h, 0, 0]],
    ])
