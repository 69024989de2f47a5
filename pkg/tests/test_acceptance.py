"""Acceptance criteria 1-10.

Each test runs the corresponding regression check and then re-asserts the
headline numbers directly, so a silent change in the check itself cannot hide
a regression.  One ``criterion N: PASS|FAIL`` line per criterion is printed in
the terminal summary.
"""

from fractions import Fraction

import pytest

from froblab import suite
from froblab.exact import Registry
from froblab.series import NovikovSeries, series_log

RESULTS = {}


def record(n, ok, detail):
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def test_criterion_1(cp1_plain):
    ok, detail = suite.criterion_1()
    reg, frame, parts = cp1_plain
    dG = parts["total"]
    ok = ok and dG["logq1"].truncate(6).agrees(NovikovSeries.constant(reg, Fraction(-1, 24), 6))
    record(1, ok, detail)


def test_criterion_2():
    record(2, *suite.criterion_2())


def test_criterion_3():
    from froblab.singularity import a2_frame

    ok, detail = suite.criterion_3()
    fr = a2_frame(0, 3)
    ok = ok and fr.R == [Fraction(1, 144), Fraction(-1, 144)] and fr.u[0] - fr.u[1] == -4
    record(3, ok, detail)


def test_criterion_4():
    record(4, *suite.criterion_4())


def test_criterion_5():
    record(5, *suite.criterion_5())


def test_criterion_6(conifold):
    ok, detail = suite.criterion_6()
    reg = conifold["frobenius"].reg
    covers = conifold["covers"]
    want = series_log(NovikovSeries.constant(reg, 1, 8) - NovikovSeries.monomial(reg, 1, 8)).scale(Fraction(-1, 12))
    ok = ok and covers.agrees(want) and conifold["dG"]["logq1"].constant_term() == Fraction(1, 8)
    record(6, ok, detail)


def test_criterion_7():
    from froblab.toric import yukawa_series

    ok, detail = suite.criterion_7()
    Y = yukawa_series(8)
    ok = ok and Y.agrees(NovikovSeries.from_dict(Registry(()), {d: 1 for d in range(1, 8)}, 8))
    record(7, ok, detail)


def test_criterion_8():
    record(8, *suite.criterion_8())


def test_criterion_9():
    record(9, *suite.criterion_9())


def test_criterion_10():
    record(10, *suite.criterion_10())


@pytest.mark.parametrize("n", sorted(suite.CRITERIA))
def test_perturbed_criterion_fails(n):
    """Corrupting the expected value must flip the criterion (order kept small for speed)."""
    _, fn = suite.CRITERIA[n]
    ok, _ = fn(4 if n not in (3, 4, 10) else None, True)
    assert not ok
