from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from froblab.errors import DegenerateCritical, IllConditioned, OnCaustic
from froblab.singularity import (Jet4, _poly, a2_family, a2_frame, a3_family, numeric_morse_pipeline,
                                 stationary_phase_R)
from froblab.suite import gaussian_moment_R

from conftest import nonzero_fracs, small_fracs


@given(nonzero_fracs, small_fracs, small_fracs, nonzero_fracs, small_fracs, small_fracs)
def test_stationary_phase_matches_gaussian_moments(A, B, C, a0, a1, a2):
    assert stationary_phase_R(Jet4(0, A, B, C, a0, a1, a2)) == gaussian_moment_R(A, B, C, a0, a1, a2)


def test_gaussian_oracle_frozen():
    # pure quartic: C/(8 A^2); pure cubic: -5 B^2/(24 A^3)
    assert gaussian_moment_R(1, 0, 1, 1, 0, 0) == Fraction(1, 8)
    assert gaussian_moment_R(1, 1, 0, 1, 0, 0) == Fraction(-5, 24)
    assert gaussian_moment_R(2, 0, 0, 1, 0, 1) == Fraction(-1, 4)


def test_degenerate_jets():
    with pytest.raises(DegenerateCritical):
        stationary_phase_R(Jet4(0, 0, 1, 0))
    with pytest.raises(DegenerateCritical):
        stationary_phase_R(Jet4(0, 1, 1, 0, 0))


def test_a2_exact_point():
    fr = a2_frame(0, 3)  # x = 1
    assert fr.x == [1, -1]
    assert fr.u == [-2, 2]
    assert fr.delta == [6, -6]
    assert fr.R == [Fraction(1, 144), Fraction(-1, 144)]
    assert all(v == 0 for v in fr.dG.values())


def test_a2_symbolic():
    fr = a2_frame()
    u = fr.u[0] - fr.u[1]
    assert fr.R[0] == -1 / (36 * u)
    assert (fr.delta[0] ** 3 / (-u / 4)).is_constant()
    assert all(v.is_zero() for v in fr.dG.values())


def test_a2_surd_point_and_caustic():
    fr = a2_frame(1, 1)
    assert fr.surd == Fraction(1, 3)
    assert all(v.is_zero() for v in fr.dG.values())
    with pytest.raises(OnCaustic):
        a2_frame(0, 0)


def test_numeric_matches_exact():
    rep = numeric_morse_pipeline(a2_family(0.0, 3.0))
    Rs = sorted(p.R.real for p in rep.points)
    assert np.allclose(Rs, [-1 / 144, 1 / 144], atol=1e-12)
    assert rep.residual < 1e-9


def test_near_caustic_is_ill_conditioned():
    with pytest.raises(IllConditioned):
        numeric_morse_pipeline(a2_family(0.0, 1e-14))


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_a3_dG_vanishes(a, b, c):
    try:
        rep = numeric_morse_pipeline(a3_family(a, b, c))
    except IllConditioned:
        return
    assert rep.residual < 1e-8


def _jacobians(fam, h=1e-6):
    base = numeric_morse_pipeline(fam).points
    n = len(base)
    phis = [_poly(p) for p in fam.deformations]
    M = np.array([[phi(p.z) for phi in phis] for p in base])
    out = {k: np.zeros((n, n), complex) for k in ("logD", "R", "u")}
    for k in range(n):
        plus, minus = list(fam.params), list(fam.params)
        plus[k] += h
        minus[k] -= h
        P = numeric_morse_pipeline(fam.with_params(plus)).points
        Q = numeric_morse_pipeline(fam.with_params(minus)).points
        for a, pt in enumerate(base):
            i = min(range(n), key=lambda j: abs(P[j].z - pt.z))
            m = min(range(n), key=lambda j: abs(Q[j].z - pt.z))
            out["logD"][a, k] = (np.log(P[i].delta) - np.log(Q[m].delta)) / (2 * h)
            out["R"][a, k] = (P[i].R - Q[m].R) / (2 * h)
            out["u"][a, k] = (P[i].u - Q[m].u) / (2 * h)
    return M, out


@pytest.mark.parametrize("params", [(0.7, -0.3, 0.1), (-1.2, 0.5, 0.0)])
def test_envelope_and_R_flow(params):
    fam = a3_family(*params)
    M, J = _jacobians(fam)
    # critical values move with the deformation monomials at the critical points
    assert np.max(np.abs(J["u"] - M)) < 1e-8
    # dR_a = 1/4 sum_b (d_a log Delta_b)(d_b log Delta_a)(du_b - du_a), derivatives in canonical coordinates
    X = J["logD"] @ np.linalg.inv(M)
    for a in range(3):
        rhs = sum(X[b, a] * X[a, b] * (M[b] - M[a]) for b in range(3) if b != a) / 4
        assert np.max(np.abs(J["R"][a] - rhs)) < 1e-6
