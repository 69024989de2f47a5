import random
from fractions import Fraction
from itertools import product
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from froblab.dmflow import DescendantSeries, dm_potentials, exp_product_jet, random_descendant, string_flow
from froblab.errors import NoConvergence
from froblab.exact import Registry
from froblab.series import NovikovSeries, series_log

EMPTY = Registry(())
ORDER = 5


def genus0_u(T, order):
    """u = sum_n (1/n) sum over k_1 + ... + k_n = n - 1 of prod t_{k_i} / k_i!  (oracle)."""
    acc = NovikovSeries.zero(T.reg, order, T.weights)
    for n in range(1, int(order) + 1):
        for ks in product(range(min(n, len(T.coeffs))), repeat=n):
            if sum(ks) != n - 1:
                continue
            term = NovikovSeries.constant(T.reg, Fraction(1, n), order, T.weights)
            for k in ks:
                term = term * T[k].scale(Fraction(1, factorial(k)))
            acc = acc + term
    return acc.truncate(order)


seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_u_matches_intersection_oracle(seed):
    rng = random.Random(seed)
    T = random_descendant(rng, EMPTY, ORDER, length=rng.randint(1, 3))
    P = dm_potentials(T, ORDER)
    assert P.u.agrees(genus0_u(T, ORDER))


@given(seeds)
def test_potentials_closed_forms(seed):
    rng = random.Random(seed)
    T = random_descendant(rng, EMPTY, ORDER, length=3)
    P = dm_potentials(T, ORDER)
    assert P.mu.agrees(P.u.scale(Fraction(1, 24)))
    assert P.nu.agrees(series_log(P.delta).scale(Fraction(1, 24)))
    assert P.v.numerator().agrees(exp_product_jet(P.u, 3, 3))
    # s = exp(u / hbar)
    assert P.s[-2].agrees((P.u * P.u).scale(Fraction(1, 2)))


@given(seeds)
def test_reflow_is_stationary(seed):
    rng = random.Random(seed)
    T = random_descendant(rng, EMPTY, ORDER, length=3)
    _, flowed = string_flow(T)
    tau, _ = string_flow(flowed)
    assert tau.is_zero()


@given(seeds)
def test_dilaton_shift(seed):
    """Moving t1 by eps: d u / d eps at eps = 0 equals u delta (second Novikov variable plays eps)."""
    rng = random.Random(seed)
    T = random_descendant(rng, EMPTY, ORDER, length=3, nvars=1)
    two = [NovikovSeries.from_dict(EMPTY, {(int(e[0]), 0): c for e, c in s.items()}, ORDER, (1, 1))
           for s in T.coeffs]
    two[1] = two[1] + NovikovSeries.monomial(EMPTY, (0, 1), ORDER, weights=(1, 1))
    P2 = dm_potentials(DescendantSeries(two), ORDER)
    P = dm_potentials(T, ORDER)
    slope = {(int(e[0]),): c for e, c in P2.u.items() if e[1] == 1}
    slope = NovikovSeries.from_dict(EMPTY, slope, ORDER - 1)
    assert slope.agrees((P.u * P.delta).truncate(ORDER - 1))


def test_homogeneous_input_gives_degree_one():
    reg = Registry(("s",))
    s = reg.gen("s")
    o = 5
    # deg t_n = 1 - n with deg s = 1
    t0 = NovikovSeries.from_dict(reg, {1: s, 2: 3 * s}, o)
    t1 = NovikovSeries.from_dict(reg, {1: reg.const(2)}, o)
    t2 = NovikovSeries.from_dict(reg, {1: 1 / s, 3: -1 / s}, o)
    P = dm_potentials(DescendantSeries([t0, t1, t2]), o)
    assert all(c.homogeneous_degree() == 1 for _, c in P.u.items())


def test_frozen_small_case():
    # t0 = q, t1 = q: u = q / (1 - q)
    q = NovikovSeries.monomial(EMPTY, 1, 6)
    P = dm_potentials(DescendantSeries([q, q]), 6)
    assert P.u.agrees(NovikovSeries.from_dict(EMPTY, {k: 1 for k in range(1, 6)}, 6))
    assert P.delta.agrees(NovikovSeries.geometric(EMPTY, 6))


def test_support_condition():
    one = NovikovSeries.constant(EMPTY, 1, 4)
    with pytest.raises(NoConvergence):
        string_flow(DescendantSeries([one * 0, one]))
    with pytest.raises(ValueError):
        DescendantSeries([])
