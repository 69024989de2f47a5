from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from froblab.exact import MultiPoly, Registry, ratfunc_normalize
from froblab.series import NovikovSeries

settings.register_profile(
    "froblab", max_examples=25, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("froblab")

XY = Registry(("x", "y"))
EMPTY = Registry(())

small_fracs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
nonzero_fracs = small_fracs.filter(lambda f: f != 0)


@st.composite
def polys(draw, reg=XY, max_terms=3, max_deg=2, nonzero=False):
    terms = {}
    for _ in range(draw(st.integers(1 if nonzero else 0, max_terms))):
        e = tuple(draw(st.integers(0, max_deg)) for _ in reg.names)
        terms[e] = draw(nonzero_fracs)
    p = MultiPoly(reg, terms)
    if nonzero and p.is_zero():
        p = MultiPoly.constant(reg, 1)
    return p


@st.composite
def ratfuncs(draw, reg=XY):
    return ratfunc_normalize(draw(polys(reg)), draw(polys(reg, nonzero=True)))


@st.composite
def series(draw, order=5, reg=EMPTY, unit=False, positive=False):
    """One-variable series with small rational coefficients."""
    terms = {k: draw(small_fracs) for k in range(1 if positive else 0, order)}
    if unit:
        terms[0] = draw(nonzero_fracs)
    return NovikovSeries.from_dict(reg, terms, order)


@pytest.fixture(scope="session")
def cp1_plain():
    from froblab.suite import cp1_frame

    return cp1_frame(6, False)


@pytest.fixture(scope="session")
def cp1_equivariant():
    from froblab.suite import cp1_frame

    return cp1_frame(6, True)


@pytest.fixture(scope="session")
def conifold():
    from froblab.toric import conifold_pipeline

    return conifold_pipeline(8)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
