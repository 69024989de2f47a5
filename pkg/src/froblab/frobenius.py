"""Frobenius algebra data: pairing, quantum products and their structural checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DegenerateRelation, NonUnitDivisor
from .exact import RatFunc, Registry
from .linalg import Matrix, det, mat_inv, mat_mul, transpose
from .series import NovikovSeries, coframe_names

Vector = List[NovikovSeries]


@dataclass
class FrobeniusData:
    """A commutative algebra over K[[q]] with a constant pairing.

    ``products[(i, j)]`` is the coordinate vector of ``phi_i o phi_j``.
    ``directions`` maps each log q_i coordinate name to the basis vector whose
    product operator gives the derivative in that direction; ``t0`` is the unit.
    """

    reg: Registry
    basis: Tuple[str, ...]
    eta: List[List[RatFunc]]
    products: Dict[Tuple[int, int], Vector]
    directions: Dict[str, List[RatFunc]]
    order: Fraction
    weights: Tuple = (1,)
    q_degrees: Tuple = (0,)
    basis_degrees: Tuple = ()
    eta_inv: List[List[RatFunc]] = field(default=None)

    def __post_init__(self):
        self.order = Fraction(self.order)
        n = len(self.basis)
        if not self.basis_degrees:
            self.basis_degrees = (0,) * n
        self.q_degrees = tuple(Fraction(c) for c in self.q_degrees)
        self.basis_degrees = tuple(Fraction(c) for c in self.basis_degrees)
        if self.eta_inv is None:
            self.eta_inv = _ratfunc_inverse(self.eta)
        for i in range(n):
            for j in range(n):
                if (i, j) not in self.products and (j, i) in self.products:
                    self.products[(i, j)] = self.products[(j, i)]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def nvars(self) -> int:
        return len(self.weights)

    def const(self, c) -> NovikovSeries:
        return NovikovSeries.constant(self.reg, c, self.order, self.weights)

    def basis_vector(self, i: int) -> Vector:
        return [self.const(1 if k == i else 0) for k in range(self.rank)]

    def coordinates(self) -> Tuple[str, ...]:
        return coframe_names(self.nvars)

    def eta_series(self) -> Matrix:
        return [[self.const(c) for c in row] for row in self.eta]

    def multiplication_matrix(self, vec: Sequence) -> Matrix:
        """Matrix of x -> vec o x; column j holds vec o phi_j."""
        n = self.rank
        cols = []
        for j in range(n):
            acc = [self.const(0) for _ in range(n)]
            for i in range(n):
                c = vec[i]
                if isinstance(c, NovikovSeries):
                    if c.is_zero():
                        continue
                    acc = [a + c * p for a, p in zip(acc, self.products[(i, j)])]
                else:
                    c = self.reg.coerce(c)
                    if c.is_zero():
                        continue
                    acc = [a + p.scale(c) for a, p in zip(acc, self.products[(i, j)])]
            cols.append(acc)
        return transpose(cols)

    def direction_matrix(self, name: str) -> Matrix:
        if name == "t0":
            return [[self.const(1 if i == j else 0) for j in range(self.rank)] for i in range(self.rank)]
        return self.multiplication_matrix(self.directions[name])

    @classmethod
    def from_relation(cls, reg: Registry, generator: str, relation: Sequence[NovikovSeries],
                      eta, order, q_degrees=(0,), generator_degree=1, weights=(1,)):
        """Algebra K[[q]][p]/(p^n - sum_k relation[k] p^k) on the basis 1, p, ..., p^(n-1)."""
        n = len(relation)
        labels = tuple("1" if k == 0 else (generator if k == 1 else f"{generator}^{k}") for k in range(n))
        zero = NovikovSeries.zero(reg, order, weights)
        one = NovikovSeries.constant(reg, 1, order, weights)
        powers = []  # normal forms of p^m for m < 2n-1
        for m in range(2 * n - 1):
            if m < n:
                powers.append([one if k == m else zero for k in range(n)])
            else:
                prev = powers[m - 1]
                top = prev[n - 1]
                shifted = [zero] + prev[:-1]
                powers.append([s + top * relation[k] for k, s in enumerate(shifted)])
        products = {(i, j): powers[i + j] for i in range(n) for j in range(n)}
        directions = {"logq1": [reg.const(1 if k == 1 else 0) for k in range(n)]}
        eta = [[reg.coerce(c) for c in row] for row in eta]
        return cls(reg, labels, eta, products, directions, order, tuple(weights), tuple(q_degrees),
                   tuple(generator_degree * k for k in range(n)))


def _ratfunc_inverse(m):
    n = len(m)
    reg = m[0][0].reg
    a = [[reg.coerce(x) for x in row] + [reg.const(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not a[r][c].is_zero()), None)
        if piv is None:
            raise ValueError("pairing matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = a[c][c].inverse()
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and not a[r][c].is_zero():
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def quantum_product(data: FrobeniusData, a: Sequence, b: Sequence) -> Vector:
    """Bilinear product of two coordinate vectors (entries series or constants)."""
    n = data.rank
    out = [data.const(0) for _ in range(n)]
    for i in range(n):
        ai = a[i] if isinstance(a[i], NovikovSeries) else data.const(a[i])
        if ai.is_zero():
            continue
        for j in range(n):
            bj = b[j] if isinstance(b[j], NovikovSeries) else data.const(b[j])
            if bj.is_zero():
                continue
            c = ai * bj
            out = [o + c * p for o, p in zip(out, data.products[(i, j)])]
    return out


@dataclass
class CheckResult:
    passed: bool
    witness: Optional[dict] = None

    def __bool__(self):
        return self.passed


def _first_difference(lhs: Vector, rhs: Vector, order, basis):
    for k, (x, y) in enumerate(zip(lhs, rhs)):
        d = (x - y).truncate(order)
        if not d.is_zero():
            exps, c = d.items()[0]
            return {"component": basis[k], "exponent": [str(e) for e in exps], "difference": str(c)}
    return None


def wdvv_check(data: FrobeniusData, order=None) -> CheckResult:
    """Associativity (a o b) o c = a o (b o c) on all basis triples, in lexicographic order."""
    order = data.order if order is None else Fraction(order)
    n = data.rank
    for i in range(n):
        for j in range(n):
            for k in range(n):
                ei, ej, ek = data.basis_vector(i), data.basis_vector(j), data.basis_vector(k)
                lhs = quantum_product(data, quantum_product(data, ei, ej), ek)
                rhs = quantum_product(data, ei, quantum_product(data, ej, ek))
                diff = _first_difference(lhs, rhs, order, data.basis)
                if diff is not None:
                    diff["triple"] = (data.basis[i], data.basis[j], data.basis[k])
                    return CheckResult(False, diff)
    return CheckResult(True)


def commutativity_check(data: FrobeniusData) -> CheckResult:
    n = data.rank
    for i in range(n):
        for j in range(i + 1, n):
            diff = _first_difference(data.products[(i, j)], data.products[(j, i)], data.order, data.basis)
            if diff is not None:
                diff["pair"] = (data.basis[i], data.basis[j])
                return CheckResult(False, diff)
    return CheckResult(True)


def self_adjoint_check(data: FrobeniusData) -> CheckResult:
    """eta A_i = A_i^T eta for every direction."""
    eta = data.eta_series()
    for name in data.coordinates():
        A = data.direction_matrix(name)
        left = mat_mul(eta, A)
        right = mat_mul(transpose(A), eta)
        for r in range(data.rank):
            for c in range(data.rank):
                if not left[r][c].agrees(right[r][c]):
                    return CheckResult(False, {"direction": name, "entry": (r, c)})
    return CheckResult(True)


def unity_check(data: FrobeniusData) -> CheckResult:
    for j in range(data.rank):
        diff = _first_difference(data.products[(0, j)], data.basis_vector(j), data.order, data.basis)
        if diff is not None:
            diff["element"] = data.basis[j]
            return CheckResult(False, diff)
    return CheckResult(True)


def euler_grading_check(data: FrobeniusData) -> CheckResult:
    """Every structural constant is homogeneous of the weight the grading predicts.

    The coefficient of phi_k in phi_i o phi_j at q^d must have weighted degree
    deg phi_i + deg phi_j - deg phi_k - sum_l d_l deg q_l, with the registry
    symbol degrees (deg lambda = 1 by default).
    """
    n = data.rank
    bd = data.basis_degrees
    for i in range(n):
        for j in range(i, n):
            for k, s in enumerate(data.products[(i, j)]):
                for exps, c in s.items():
                    expected = bd[i] + bd[j] - bd[k] - sum(e * cq for e, cq in zip(exps, data.q_degrees))
                    found = c.homogeneous_degree()
                    if found is None or found != expected:
                        return CheckResult(False, {
                            "product": (data.basis[i], data.basis[j]),
                            "component": data.basis[k],
                            "exponent": [str(e) for e in exps],
                            "expected_degree": str(expected),
                            "found_degree": None if found is None else str(found),
                        })
    return CheckResult(True)


# ---------------------------------------------------------------- residue pairing


def _poly_mulmod(a: Vector, b: Vector, relation: Vector) -> Vector:
    """Product of polynomials in p (coefficient lists, low degree first) mod a monic relation.

    ``relation`` holds r_0..r_n with r_n = 1.
    """
    n = len(relation) - 1
    prod: Dict[int, NovikovSeries] = {}
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if y.is_zero():
                continue
            t = x * y
            prod[i + j] = t if i + j not in prod else prod[i + j] + t
    top = max(prod, default=0)
    coeffs = [prod.get(k) for k in range(max(top + 1, n))]
    zero = relation[0] * 0
    coeffs = [c if c is not None else zero for c in coeffs]
    for m in range(len(coeffs) - 1, n - 1, -1):
        lead = coeffs[m]
        if lead.is_zero():
            continue
        for k in range(n):
            coeffs[m - n + k] = coeffs[m - n + k] - lead * relation[k]
        coeffs[m] = zero
    return coeffs[:n]


def residue_pairing(phi: Sequence[NovikovSeries], psi: Sequence[NovikovSeries],
                    relation: Sequence[NovikovSeries]) -> NovikovSeries:
    """(1/2 pi i) contour integral of phi psi dp / relation around all roots.

    Computed as the trace of multiplication by phi psi / relation' in the
    quotient algebra (companion-matrix calculus, no roots extracted).
    """
    relation = list(relation)
    n = len(relation) - 1
    if relation[-1].constant_term() != 1 or any(not x.is_zero() for x in [relation[-1] - 1]):
        raise ValueError("relation must be monic")
    zero = relation[0] * 0
    one = zero + 1

    def mult_matrix(g: Vector) -> Matrix:
        cols = []
        for j in range(n):
            basis = [one if k == j else zero for k in range(n)]
            cols.append(_poly_mulmod(g, basis, relation))
        return transpose(cols)

    deriv = [relation[k] * k for k in range(1, n + 1)]
    g = _poly_mulmod(list(phi), list(psi), relation)
    Md = mult_matrix(deriv)
    D = det(Md)
    if D.is_zero():
        raise DegenerateRelation("relation has a repeated root at the working order")
    try:
        Mdinv = mat_inv(Md, allow_shift=True)
    except NonUnitDivisor as exc:
        raise DegenerateRelation(str(exc)) from None
    M = mat_mul(mult_matrix(g), Mdinv)
    tr = M[0][0]
    for k in range(1, n):
        tr = tr + M[k][k]
    return tr
