from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from froblab.errors import NonNegativityViolated, NonUnitLeading
from froblab.exact import Registry
from froblab.series import HJet, NovikovSeries
from froblab.toric import (CohJet, CohomologyRing, ToricBundleData, _lp_mul, conifold_data, genus0_cover_potential,
                           hypergeom_I, hypergeom_I_concave, hypergeom_I_convex, i_term, mirror_map_extract,
                           multiple_cover_residue, phi_series, quantum_relation_extract, residue_at_zero, signed_q,
                           yukawa_series)

from conftest import nonzero_fracs, small_fracs

LAM = Registry(("lam",))
lam = LAM.gen("lam")


def cp1_ring():
    return CohomologyRing(LAM, ["p"], [[-(lam * lam), 0, 1]])


def bundle(l, lam_prime, orientation="concave"):
    return ToricBundleData(cp1_ring(), [[1, 1]], l, [lam, -lam], lam_prime, orientation)


# ---------------------------------------------------------------- cohomology ring


TWO = CohomologyRing(LAM, ["a", "b"], [[lam, 0, 1], [0, -lam, 0, 1]])


@given(st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 6)), nonzero_fracs, max_size=5))
def test_normal_form_idempotent(raw):
    elem = {e: LAM.const(c) * lam ** (e[0] % 2) for e, c in raw.items()}
    once = TWO.reduce(elem)
    assert all(e in TWO.basis for e in once)
    assert TWO.equal(TWO.reduce(once), once)


def test_ring_products():
    ring = cp1_ring()
    p = ring.gen(0)
    assert ring.equal(ring.mul(p, p), ring.const(lam * lam))
    a = TWO.gen(0)
    assert TWO.equal(TWO.mul(a, a), TWO.const(-lam))


# ---------------------------------------------------------------- I-series


def test_homogeneity_degree_zero():
    data = bundle([[1]], [LAM.const(0)])  # c1 pairs to 2 - 1 = 1
    I = hypergeom_I_concave(data, 5, (-6, 0))
    for d, lp in I.terms.items():
        for k, elem in lp.items():
            for e, c in elem.items():
                assert c.homogeneous_degree() + k + sum(e) + data.c1_pairing(d) == 0


def test_zero_bundle_reduces_to_base():
    base = ToricBundleData(cp1_ring(), [[1, 1]], [[]], [lam, -lam], [])
    trivial = bundle([[0]], [lam])
    ring = base.ring
    for d in range(5):
        a, b = i_term(base, (d,), -5), i_term(trivial, (d,), -5)
        assert a.keys() == b.keys()
        assert all(ring.equal(a[k], b[k]) for k in a)


def test_convex_concave_ratio():
    conc = bundle([[1, 1]], [LAM.const(0)] * 2, "concave")
    conv = bundle([[1, 1]], [LAM.const(0)] * 2, "convex")
    ring = conv.ring
    lo = -5
    for d in range(1, 5):
        L = conv.L((d,))
        lhs = i_term(conv, (d,), lo)
        for j in range(2):
            lhs = _lp_mul(ring, lhs, {0: conv.v(j)}, lo)
        rhs = i_term(conc, (d,), lo)
        for j, Lj in enumerate(L):
            rhs = _lp_mul(ring, rhs, {0: conv.v(j), 1: ring.const(Lj)}, lo)
        sign = (-1) ** sum(L)
        # each factor (v + L hbar) pulls one truncated order into view
        for k in range(lo + len(L), 1):
            assert ring.equal(lhs.get(k, {}), ring.scale(rhs.get(k, {}), sign))


def test_convex_leading_term_is_phi():
    data = bundle([[1, 1]], [LAM.const(0)] * 2, "convex")
    I = hypergeom_I_convex(data, 6, (-3, 0))
    lead = I.coefficient(0)
    phi = phi_series(data, 6)
    assert set(lead) == {(0,)}
    assert lead[(0,)].agrees(phi)
    assert phi.agrees(NovikovSeries.geometric(LAM, 6))


def test_signed_q():
    odd = bundle([[1]], [LAM.const(0)])
    s = NovikovSeries.geometric(LAM, 4)
    assert signed_q(s, odd).agrees(NovikovSeries.from_dict(LAM, {0: 1, 1: -1, 2: 1, 3: -1}, 4))
    assert signed_q(s, conifold_data()).agrees(s)


def test_nonnegativity():
    with pytest.raises(NonNegativityViolated):
        bundle([[3]], [LAM.const(0)]).check_nonnegativity()
    with pytest.raises(NonNegativityViolated):
        hypergeom_I(bundle([[-1]], [LAM.const(0)]), 3)


# ---------------------------------------------------------------- mirror map


@st.composite
def artificial_I(draw, order=5):
    ring = cp1_ring()

    def ser(positive=True, const=None):
        terms = {k: draw(small_fracs) for k in range(1 if positive else 0, order)}
        if const is not None:
            terms[0] = const
        return NovikovSeries.from_dict(LAM, {k: LAM.const(c) for k, c in terms.items()}, order)

    phi = ser(const=draw(nonzero_fracs))
    F = ser() + ser().scale(lam)
    f = ser()
    low = {(0,): ser(False), (1,): ser(False)}
    coeffs = {
        (0,): {0: phi, -1: phi * F, -2: low[(0,)]},
        (1,): {0: phi * 0, -1: phi * f, -2: low[(1,)]},
    }
    comps = {e: HJet(c, -2, 0, "inverse", LAM, order, (1,)) for e, c in coeffs.items()}
    return CohJet(ring, comps, -2, 0, Fraction(order)), phi, F, f


@given(artificial_I())
def test_mirror_map_idempotent(data):
    I, phi, F, f = data
    mm, J = mirror_map_extract(I)
    assert mm.phi.agrees(phi)
    assert mm.f[0].agrees(f)
    assert (mm.f0 + mm.g["lam"].scale(lam)).agrees(F)
    mm2, J2 = mirror_map_extract(J)
    assert mm2.is_identity()
    for e in J.comps:
        for k in range(-2, 1):
            assert J2.comps[e][k].agrees(J.comps[e][k])


def test_mirror_map_rejects_non_unit():
    I = hypergeom_I_concave(conifold_data(), 3, (-2, 0))
    I.comps[(1,)] = HJet({0: NovikovSeries.constant(LAM, 1, 3), -1: NovikovSeries.zero(LAM, 3),
                          -2: NovikovSeries.zero(LAM, 3)}, -2, 0, "inverse", LAM, 3, (1,))
    with pytest.raises(NonUnitLeading):
        mirror_map_extract(I)


# ---------------------------------------------------------------- relations


def test_relation_matches_eigenvalue_squares(conifold):
    rel = conifold["relation"]
    for ev in conifold["frame"].split.eigenvalues["logq1"]:
        sq = (ev * ev).truncate(rel[0].order)
        assert sq.agrees(rel[0])


def test_relation_is_proportional_to_classical():
    data = conifold_data()
    I = hypergeom_I_concave(data, 6, (-2, 0))
    phi, result, classical = quantum_relation_extract(I, data, [0, 1])
    # classical p^2 = lam^2; quantum product lam^2 / (1 - q)
    assert data.ring.equal(classical, data.ring.const(lam * lam))
    assert phi.agrees(NovikovSeries.geometric(LAM, phi.order))


# ---------------------------------------------------------------- residues


HB = Registry(("hbar",))


def _sym(f):
    return sympy.sympify(str(f).replace("^", "**"), locals={"hbar": sympy.Symbol("hbar")})


@given(st.integers(1, 4), st.lists(small_fracs, min_size=1, max_size=6))
def test_cover_residue_against_sympy(d, phi):
    p, h = sympy.symbols("p hbar")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * p ** k for k, c in enumerate(phi))
    expr = expr / (p ** 2 * (p + d * h) ** 2)
    want = sympy.residue(expr, p, 0) + sympy.residue(expr, p, -d * h)
    got = multiple_cover_residue(d, phi, HB)
    assert sympy.simplify(_sym(got) - want) == 0
    assert sympy.simplify(_sym(residue_at_zero(d, phi, HB)) - sympy.residue(expr, p, 0)) == 0


def test_cover_residue_frozen():
    assert multiple_cover_residue(3, [0, 0, 0, 1], HB) == 1
    assert multiple_cover_residue(3, [1], HB) == 0
    h = HB.gen("hbar")
    assert multiple_cover_residue(2, [0, 0, 0, 0, 1], HB) == -4 * h


def test_cover_potentials():
    Y = yukawa_series(6)
    assert Y.agrees(NovikovSeries.from_dict(Registry(()), {d: 1 for d in range(1, 6)}, 6))
    F0, dF0 = genus0_cover_potential(6)
    assert F0.agrees(NovikovSeries.from_dict(Registry(()), {d: Fraction(1, d ** 3) for d in range(1, 6)}, 6))
    assert F0.qderiv().agrees(dF0)
