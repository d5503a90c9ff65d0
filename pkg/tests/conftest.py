import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from blev.model import (
    BranchingModel,
    Deterministic,
    FixedConfiguration,
    Gaussian,
    Geometric,
    IidDisplaced,
    Local,
    MotionSpec,
    PointMass,
    PointMasses,
    PoissonPlusOne,
    TwoSidedExponential,
    Zeta,
)
from blev import spectral

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


small = st.floats(-1.0, 1.0, allow_nan=False)
positive = st.floats(0.2, 2.0, allow_nan=False)

jump_laws = st.one_of(
    st.builds(Gaussian, small, st.floats(0.0, 1.0)),
    st.builds(TwoSidedExponential, st.floats(0.0, 1.0), st.floats(1.5, 5.0), st.floats(1.5, 5.0)),
    st.builds(lambda a, b: PointMasses(((a, 0.5), (b, 0.5))), small, small),
)


@st.composite
def motions(draw):
    rate = draw(st.sampled_from([0.0, 0.5, 1.0]))
    law = draw(jump_laws) if rate > 0 else None
    return MotionSpec(draw(small), draw(st.floats(0.0, 1.5)), rate, law)


counts = st.one_of(
    st.builds(Deterministic, st.integers(2, 4)),
    st.builds(Geometric, st.floats(0.2, 0.8)),
    st.builds(PoissonPlusOne, st.floats(0.3, 2.0)),
    st.builds(Zeta, st.floats(2.3, 4.0)),
)

displacements = st.one_of(
    st.builds(PointMass, small),
    st.builds(Gaussian, small, st.floats(0.0, 1.0)),
    st.builds(TwoSidedExponential, st.floats(0.0, 1.0), st.floats(1.5, 5.0), st.floats(1.5, 5.0)),
)

offsprings = st.one_of(
    st.builds(Local, counts),
    st.builds(IidDisplaced, counts, displacements),
    st.builds(lambda pts: FixedConfiguration(tuple(pts)), st.lists(small, min_size=2, max_size=4)),
)

models = st.builds(BranchingModel, positive, motions(), offsprings)


def interior_thetas(model, n, rng=None, lo=0.05):
    """n points inside the finiteness domain, away from its right end."""
    dom = spectral.theta_domain(model)
    hi = min(3.0, 0.9 * dom.theta_plus) if math.isfinite(dom.theta_plus) else 3.0
    rng = np.random.default_rng(0) if rng is None else rng
    return rng.uniform(lo, hi, size=n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
