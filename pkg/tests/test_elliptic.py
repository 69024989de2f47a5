from fractions import Fraction

import pytest

from froblab.elliptic import (EllipticInput, c_minus1_from_weights, closedness_check, elliptic_breakdown,
                              elliptic_dg_conformal, elliptic_dg_two_term, homogeneity_check)
from froblab.exact import Registry
from froblab.series import NovikovSeries, OneForm


def test_c_minus1_from_weights():
    reg = Registry(("lam",))
    lam = reg.gen("lam")
    cs = c_minus1_from_weights([[2 * lam, -lam, -lam], [-2 * lam, lam, lam]])
    assert cs == [Fraction(-3, 2) / lam, Fraction(3, 2) / lam]


def test_plain_breakdown(cp1_plain):
    reg, frame, parts = cp1_plain
    o = parts["total"]["logq1"].order
    # Hessians 2 q^(1/2) contribute 2 * (1/2) / 48, the R term -1/16 - ... totals -1/24
    assert parts["hessian"]["logq1"].agrees(NovikovSeries.constant(reg, Fraction(1, 48), o))
    assert parts["R"]["logq1"].agrees(NovikovSeries.constant(reg, Fraction(-1, 16), o))
    assert elliptic_dg_conformal(frame).agrees(parts["total"])


def test_equivariant_homogeneous_and_closed(cp1_equivariant):
    reg, frame, parts = cp1_equivariant
    dG = parts["total"]
    assert closedness_check(dG)
    assert homogeneity_check(dG, frame.data.q_degrees) is None


def test_two_term_form_matches(cp1_equivariant, conifold):
    reg, frame, parts = cp1_equivariant
    lam = reg.gen("lam")
    signs = [(ev.constant_term() / lam).constant_value() for ev in frame.split.eigenvalues["logq1"]]
    cs = c_minus1_from_weights([[lam * (2 * s)] for s in signs])
    two = elliptic_dg_two_term(frame, [c * Fraction(-1, 12) for c in cs])
    assert two.agrees(parts["total"])
    f, cs = conifold["frame"], conifold["c_minus1"]
    two = elliptic_dg_two_term(f, [c * Fraction(-1, 12) for c in cs])
    assert two.agrees(conifold["breakdown"]["total"])


def test_closedness_witness():
    reg = Registry(())
    o = 4
    form = OneForm({"t0": NovikovSeries.monomial(reg, 1, o), "logq1": NovikovSeries.zero(reg, o)})
    res = closedness_check(form)
    assert not res and res.witness == ("t0", "logq1")


def test_equivariant_needs_constants(cp1_plain):
    _, frame, _ = cp1_plain
    with pytest.raises(ValueError):
        EllipticInput(frame, None, "equivariant")
    with pytest.raises(ValueError):
        elliptic_breakdown(EllipticInput(frame, None, "bogus"))


def test_equivariant_total_matches_plain(cp1_plain, cp1_equivariant):
    """The lambda-dependence cancels in the total, so the lambda -> 0 limit is the plain answer."""
    _, _, plain = cp1_plain
    ereg, _, equiv = cp1_equivariant
    assert plain["total"]["logq1"].constant_term() == Fraction(-1, 24)
    assert equiv["total"]["logq1"].truncate(6).agrees(NovikovSeries.constant(ereg, Fraction(-1, 24), 6))
