from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from froblab.errors import DegenerateRelation
from froblab.frobenius import (FrobeniusData, commutativity_check, euler_grading_check, quantum_product,
                               residue_pairing, self_adjoint_check, unity_check, wdvv_check)
from froblab.series import NovikovSeries
from froblab.suite import perturbed_cp2, witness_is_first_failure

from conftest import EMPTY, small_fracs

ORDER = 6
q = NovikovSeries.monomial(EMPTY, 1, ORDER)
z = NovikovSeries.zero(EMPTY, ORDER)


def projective(n):
    eta = [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)]
    return FrobeniusData.from_relation(EMPTY, "p", [q] + [z] * (n - 1), eta, ORDER, q_degrees=(n,))


@pytest.mark.parametrize("n", [2, 3])
def test_projective_space_axioms(n):
    fd = projective(n)
    for check in (wdvv_check, commutativity_check, self_adjoint_check, unity_check, euler_grading_check):
        assert check(fd), check.__name__


def test_cp2_products():
    fd = projective(3)
    p, p2 = fd.basis_vector(1), fd.basis_vector(2)
    # p o p^2 = q, p^2 o p^2 = q p
    assert [s.truncate(ORDER) for s in quantum_product(fd, p, p2)][0].agrees(q)
    assert quantum_product(fd, p2, p2)[1].agrees(q)


def test_perturbed_tensor_reports_first_failure():
    bad = perturbed_cp2(ORDER)
    res = wdvv_check(bad)
    assert not res
    assert witness_is_first_failure(bad, res.witness["triple"])
    assert tuple(res.witness["triple"]) == ("p", "p", "p^2")


def residue_at_infinity(k, monic):
    """Coefficient of z^-1 in z^k / f(z) expanded at infinity (oracle)."""
    n = len(monic) - 1
    # 1/f = z^-n / (1 + sum_j monic[n-j] z^-j); expand the bracket inverse in w = 1/z
    depth = k + 2
    g = [Fraction(0)] * depth
    g[0] = Fraction(1)
    for m in range(1, depth):
        g[m] = -sum(Fraction(monic[n - j]) * g[m - j] for j in range(1, min(m, n) + 1))
    m = k - n + 1  # z^k z^-n w^m = z^-1
    return g[m] if 0 <= m < depth else Fraction(0)


@given(st.lists(small_fracs, min_size=1, max_size=3), st.integers(0, 5))
def test_residue_pairing_matches_expansion_at_infinity(coeffs, k):
    monic = list(coeffs) + [Fraction(1)]
    rel = [NovikovSeries.constant(EMPTY, c, ORDER) for c in monic]
    n = len(monic) - 1
    one = [NovikovSeries.constant(EMPTY, 1 if i == 0 else 0, ORDER) for i in range(n)]
    pk = [NovikovSeries.constant(EMPTY, 0, ORDER) for _ in range(k + 1)]
    pk[k] = NovikovSeries.constant(EMPTY, 1, ORDER)
    try:
        got = residue_pairing(one, pk, rel)
    except DegenerateRelation:
        return
    assert got.agrees(NovikovSeries.constant(EMPTY, residue_at_infinity(k, monic), ORDER))


def test_residue_pairing_degenerate():
    rel = [NovikovSeries.constant(EMPTY, c, ORDER) for c in (0, 0, 1)]
    one = [NovikovSeries.constant(EMPTY, 1, ORDER), z]
    with pytest.raises(DegenerateRelation):
        residue_pairing(one, one, rel)
