from fractions import Fraction

import pytest
from hypothesis import given

from froblab.errors import NonUnitDivisor, NotExtendable
from froblab.exact import Registry
from froblab.series import (ExtFunction, HJet, NovikovSeries, hjet_exp_over_hbar, integrate_dlog,
                            inverse_qmap, series_exp, series_log, series_pow, series_text, substitute)

from conftest import EMPTY, series

q = NovikovSeries.monomial(EMPTY, 1, 6)


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert ((a * b) * c).agrees(a * (b * c))
    assert (a * (b + c)).agrees(a * b + a * c)
    assert (a * b).agrees(b * a)


@given(series(), series())
def test_log_derivative_is_a_derivation(a, b):
    assert (a * b).qderiv().agrees(a.qderiv() * b + a * b.qderiv())


@given(series(positive=True))
def test_integrate_inverts_derivative(a):
    assert integrate_dlog(a.qderiv()).agrees(a)


@given(series(unit=True))
def test_square_root_squares_back(a):
    c = a.constant_term().constant_value()
    if c < 0:
        a = -a
    r = series_pow(a * a, Fraction(1, 2))
    assert (r * r).agrees(a * a)


@given(series(), series(), series(positive=True))
def test_substitute_is_a_homomorphism(a, b, f):
    qmap = {0: f}
    assert substitute(a * b, qmap).agrees(substitute(a, qmap) * substitute(b, qmap))


@given(series(positive=True))
def test_inverse_qmap_round_trip(f):
    g = inverse_qmap({0: f})[0]
    # q -> q e^f then Q -> Q e^g is the identity: g(q e^f) + f = 0
    assert (substitute(g, {0: f}) + f).is_zero()


@given(series(positive=True))
def test_exp_log(a):
    assert series_log(series_exp(a)).agrees(a)


def test_order_min_rule():
    a = NovikovSeries.from_dict(EMPTY, {0: 1, 1: 2}, 5)
    b = NovikovSeries.from_dict(EMPTY, {2: 1}, 3)
    assert (a * b).order == 3  # min(5 + 2, 3 + 0)
    assert (b * b).order == 5  # min(3 + 2, 3 + 2)
    assert (a + b).order == 3
    with pytest.raises(NonUnitDivisor):
        b.inverse()
    shifted = b.inverse(allow_shift=True)
    assert shifted.lowest_term()[0] == (-2 * shifted.N,)


def test_fractional_exponents_and_text():
    s = series_pow(NovikovSeries.from_dict(EMPTY, {1: 4}, 4), Fraction(1, 2))
    assert series_text(s) == "2 * q1^1/2 + O(7/2)"
    g = NovikovSeries.geometric(EMPTY, 4)
    assert series_text(g) == "1 + 1 * q1 + 1 * q1^2 + 1 * q1^3 + O(4)"


def test_sqrt_frozen():
    # (1 + q)^(1/2) = 1 + q/2 - q^2/8 + q^3/16 - 5 q^4/128
    s = series_pow(1 + q, Fraction(1, 2)).truncate(5)
    want = NovikovSeries.from_dict(EMPTY, {0: 1, 1: Fraction(1, 2), 2: Fraction(-1, 8),
                                           3: Fraction(1, 16), 4: Fraction(-5, 128)}, 5)
    assert s.agrees(want)


def test_ext_function_shape():
    f = integrate_dlog(NovikovSeries.from_dict(EMPTY, {0: 3, 2: 4}, 5))
    assert isinstance(f, ExtFunction)
    assert f.coefficient("logq1") == 3
    assert f.series.agrees(NovikovSeries.from_dict(EMPTY, {2: 2}, 5))
    two = Registry(())
    s = NovikovSeries.from_dict(two, {(0, 1): 1}, 4, weights=(1, 1))
    with pytest.raises(NotExtendable):
        integrate_dlog(s, 0)


def test_hjet_exp_over_hbar():
    g = NovikovSeries.from_dict(EMPTY, {1: 2}, 5)
    e = hjet_exp_over_hbar(g, -3)
    assert isinstance(e, HJet)
    assert e[-2].agrees(NovikovSeries.from_dict(EMPTY, {2: 2}, 5))
    assert e[-3].agrees(NovikovSeries.from_dict(EMPTY, {3: Fraction(4, 3)}, 5))
