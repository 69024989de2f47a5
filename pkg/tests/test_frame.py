from fractions import Fraction

import pytest

from froblab.errors import NotSemisimpleAtOrigin
from froblab.frame import (assemble_S_and_verify, build_frame, diagonal_forms, dr_from_hessians, eigen_split,
                           r_ladder, symmetry_defect)
from froblab.frobenius import FrobeniusData
from froblab.linalg import mat_mul, transpose
from froblab.series import NovikovSeries, series_pow

from conftest import EMPTY


def test_plain_eigenvalues_are_half_integral(cp1_plain):
    reg, frame, _ = cp1_plain
    for ev in frame.split.eigenvalues["logq1"]:
        assert (ev * ev).agrees(NovikovSeries.monomial(reg, 1, (ev * ev).order))
    assert frame.split.eigenvalues["logq1"][0].N == 2


@pytest.mark.parametrize("which", ["cp1_plain", "cp1_equivariant"])
def test_gram_is_diagonal(which, request):
    _, frame, _ = request.getfixturevalue(which)
    eta = frame.data.eta_series()
    g = mat_mul(mat_mul(transpose(frame.psi), eta), frame.psi)
    for i in range(2):
        for j in range(2):
            if i == j:
                assert g[i][i].agrees(NovikovSeries.constant(g[i][i].reg, frame.gram[i], g[i][i].order))
            else:
                assert g[i][j].is_zero()


@pytest.mark.parametrize("which", ["cp1_plain", "cp1_equivariant"])
def test_R0_symmetric_and_ladder(which, request):
    _, frame, _ = request.getfixturevalue(which)
    assert symmetry_defect(frame) is None
    assert assemble_S_and_verify(frame, K=1)
    for pred, ladder in zip(dr_from_hessians(frame.delta, frame.du), diagonal_forms(frame, 0)):
        assert pred.agrees(ladder)


def test_equivariant_R_mod_q_and_values(cp1_equivariant):
    reg, frame, _ = cp1_equivariant
    lam = reg.gen("lam")
    plus = 0 if frame.split.eigenvalues["logq1"][0].constant_term() == lam else 1
    Rpp = frame.R[0][plus][plus]
    assert Rpp.constant_term().is_zero()
    # -1/(16p) + lam^2/(48p^3) + 1/(24 lam) with p = (lam^2 + q)^(1/2)
    o = Rpp.order
    q = NovikovSeries.monomial(reg, 1, o)
    p = series_pow(q + lam * lam, Fraction(1, 2))
    want = p.inverse().scale(Fraction(-1, 16)) + (p * p * p).inverse().scale(lam * lam / 48)
    want = want + NovikovSeries.constant(reg, (24 * lam).inverse(), o)
    assert Rpp.agrees(want)


def test_unit_row_sums(cp1_equivariant, cp1_plain):
    """Canonical components c_a of the unit satisfy c_a^2 Delta_a gram_a = 1."""
    for reg, frame, _ in (cp1_equivariant, cp1_plain):
        inv = frame.psi_inverse()
        for a in range(2):
            c = inv[a][0]
            lhs = (c * c * frame.delta[a]).scale(frame.gram[a])
            assert lhs.agrees(NovikovSeries.constant(reg, 1, lhs.order))


def test_fixed_point_row_sums(cp1_equivariant):
    """Summing the fixed-point classes (lam +- p)/2 lam gives the unit, so the
    flat-to-canonical matrix has row sums D_a^-1 with Delta_a = e_a D_a^2."""
    reg, frame, _ = cp1_equivariant
    lam = reg.gen("lam")
    inv = frame.psi_inverse()
    for a in range(2):
        total = None
        for s in (1, -1):
            comp = inv[a][0].scale(Fraction(1, 2)) + inv[a][1].scale(s * (2 * lam).inverse())
            total = comp if total is None else total + comp
        e = frame.delta[a].constant_term()
        assert (total * total * frame.delta[a]).agrees(NovikovSeries.constant(reg, e, total.order))


def test_not_semisimple():
    o = 4
    z = NovikovSeries.zero(EMPTY, o)
    fd = FrobeniusData.from_relation(EMPTY, "p", [z, z], [[0, 1], [1, 0]], o)
    with pytest.raises(NotSemisimpleAtOrigin):
        eigen_split(fd)


def test_pilot_choice_is_explicit():
    o = 6
    q = NovikovSeries.monomial(EMPTY, 1, o)
    fd = FrobeniusData.from_relation(EMPTY, "p", [q, q * 0], [[0, 1], [1, 0]], o, q_degrees=(2,))
    a = eigen_split(fd)
    b = eigen_split(fd, pilot="logq1")
    for x, y in zip(a.eigenvalues["logq1"], b.eigenvalues["logq1"]):
        assert x.agrees(y)
    frame = build_frame(fd, "conformal")
    r_ladder(frame, K=2)
    assert len(frame.R) == 2
