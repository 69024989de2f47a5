"""Hypergeometric series of toric bundles and what can be read off them.

Cohomology rings are presented as products of univariate quotients
``K[p_i] / (rel_i(p_i))``; elements are dicts from exponent tuples (each
exponent below the degree of its relation) to coefficients, which may be
rational functions or Novikov series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import NonNegativityViolated, NonUnitDivisor, NonUnitLeading, NormalFormDivergent
from .exact import RatFunc, Registry
from .series import HJet, NovikovSeries, integrate_dlog, inverse_qmap, substitute

Exps = Tuple[int, ...]


# ---------------------------------------------------------------- cohomology ring


class CohomologyRing:
    def __init__(self, reg: Registry, gens: Sequence[str], relations: Sequence[Sequence]):
        """``relations[i]`` lists r_0..r_n (r_n = 1) with rel_i = sum r_k p_i^k."""
        self.reg = reg
        self.gens = tuple(gens)
        rels = []
        for i, rel in enumerate(relations):
            rel = [reg.coerce(c) for c in rel]
            if len(rel) < 2 or rel[-1] != 1:
                raise NormalFormDivergent(f"relation for {self.gens[i]} must be monic of positive degree")
            rels.append(rel)
        self.relations = rels
        self.degrees = tuple(len(r) - 1 for r in rels)
        self.basis: List[Exps] = [tuple(e) for e in product(*[range(n) for n in self.degrees])]

    @property
    def r(self):
        return len(self.gens)

    def label(self, e: Exps) -> str:
        parts = [g if k == 1 else f"{g}^{k}" for g, k in zip(self.gens, e) if k]
        return "*".join(parts) or "1"

    def unit(self) -> Dict[Exps, object]:
        return {(0,) * self.r: self.reg.const(1)}

    def gen(self, i: int) -> Dict[Exps, object]:
        return self.reduce({tuple(1 if k == i else 0 for k in range(self.r)): self.reg.const(1)})

    def const(self, c) -> Dict[Exps, object]:
        c = self.reg.coerce(c) if not isinstance(c, NovikovSeries) else c
        return {(0,) * self.r: c}

    def reduce(self, elem: Mapping[Exps, object]) -> Dict[Exps, object]:
        work = dict(elem)
        out: Dict[Exps, object] = {}
        steps = 0
        limit = 64 * (1 + sum(self.degrees)) * (1 + len(work))
        while work:
            steps += 1
            if steps > limit:
                raise NormalFormDivergent("normal form reduction does not terminate")
            e, c = work.popitem()
            i = next((k for k, (x, n) in enumerate(zip(e, self.degrees)) if x >= n), None)
            if i is None:
                out[e] = _add(out.get(e), c)
                continue
            n = self.degrees[i]
            for k, r in enumerate(self.relations[i][:-1]):
                if r.is_zero():
                    continue
                e2 = tuple(x - n + k if j == i else x for j, x in enumerate(e))
                work[e2] = _add(work.get(e2), -(c * r))
        return {e: c for e, c in out.items() if not _is_zero(c)}

    def mul(self, a, b):
        out: Dict[Exps, object] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = _add(out.get(e), c1 * c2)
        return self.reduce(out)

    def add(self, a, b):
        out = dict(a)
        for e, c in b.items():
            out[e] = _add(out.get(e), c)
        return {e: c for e, c in out.items() if not _is_zero(c)}

    def scale(self, a, c):
        return {e: x * c for e, x in a.items() if not _is_zero(x * c)}

    def equal(self, a, b) -> bool:
        keys = set(a) | set(b)
        for e in keys:
            x, y = a.get(e), b.get(e)
            if x is None:
                x, y = y, x
            if y is None:
                if not _is_zero(x):
                    return False
            elif isinstance(x, NovikovSeries) or isinstance(y, NovikovSeries):
                if not (x - y).is_zero():
                    return False
            elif x != y:
                return False
        return True


def _add(a, b):
    if a is None:
        return b
    return a + b


def _is_zero(c) -> bool:
    return c.is_zero()


# ---------------------------------------------------------------- bundle data


@dataclass
class ToricBundleData:
    """w_j = sum_i p_i m_ij - lambda_j and the l-block classes v_j.

    ``orientation`` is 'concave' (v_j = lambda'_j - sum p_i l_ij) or
    'convex' (v_j = sum p_i l_ij - lambda'_j).
    """

    ring: CohomologyRing
    m: List[List[int]]
    l: List[List[int]]
    lam: List[RatFunc]
    lam_prime: List[RatFunc]
    orientation: str = "concave"
    cone: Optional[List[Tuple[int, ...]]] = None
    name: str = ""

    def __post_init__(self):
        r = self.ring.r
        if len(self.m) != r or len(self.l) != r:
            raise ValueError("m and l need one row per divisor class p_i")
        if any(len(row) != len(self.lam) for row in self.m):
            raise ValueError("m rows must match the number of weights lambda_j")
        if any(len(row) != len(self.lam_prime) for row in self.l):
            raise ValueError("l rows must match the number of weights lambda'_j")
        if self.orientation not in ("concave", "convex"):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.cone is None:
            self.cone = [tuple(1 if k == i else 0 for k in range(r)) for i in range(r)]
        self.lam = [self.ring.reg.coerce(x) for x in self.lam]
        self.lam_prime = [self.ring.reg.coerce(x) for x in self.lam_prime]

    @property
    def reg(self):
        return self.ring.reg

    @property
    def r(self):
        return self.ring.r

    def D(self, d) -> List[int]:
        return [sum(d[i] * self.m[i][j] for i in range(self.r)) for j in range(len(self.lam))]

    def L(self, d) -> List[int]:
        return [sum(d[i] * self.l[i][j] for i in range(self.r)) for j in range(len(self.lam_prime))]

    def w(self, j: int):
        ring = self.ring
        acc = ring.const(-self.lam[j])
        for i in range(self.r):
            if self.m[i][j]:
                acc = ring.add(acc, ring.scale(ring.gen(i), self.m[i][j]))
        return acc

    def v(self, j: int):
        ring = self.ring
        sign = 1 if self.orientation == "convex" else -1
        acc = ring.const(self.lam_prime[j] * (-sign))
        for i in range(self.r):
            if self.l[i][j]:
                acc = ring.add(acc, ring.scale(ring.gen(i), sign * self.l[i][j]))
        return acc

    def c1_pairing(self, d) -> int:
        return sum(self.D(d)) - sum(self.L(d))

    def check_nonnegativity(self):
        for g in self.cone:
            if self.c1_pairing(g) < 0:
                raise NonNegativityViolated(f"first Chern class pairs negatively with {g}")
        if any(x < 0 for row in self.l for x in row):
            raise NonNegativityViolated("l-block entries must be non-negative")

    def degrees_below(self, order) -> List[Tuple[int, ...]]:
        """Cone points of total degree < order (cone generated by unit vectors)."""
        out = []
        for d in product(range(int(order) + 1), repeat=self.r):
            if sum(d) < order:
                out.append(d)
        return sorted(out, key=lambda d: (sum(d), d))


# ---------------------------------------------------------------- hbar polynomials over the ring
#
# A Laurent polynomial in hbar with ring coefficients is a dict power -> element.


def _lp_mul(ring, a, b, lo):
    out = {}
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            k = k1 + k2
            if k < lo:
                continue
            out[k] = ring.add(out.get(k, {}), ring.mul(c1, c2))
    return {k: c for k, c in out.items() if c}


def _linear_factor(ring, elem, k):
    """elem + k hbar."""
    out = {0: elem} if elem else {}
    if k:
        out[1] = ring.const(k)
    return out


def _inverse_factor(ring, elem, k, lo):
    """1 / (elem + k hbar) = sum_n (-elem)^n / (k hbar)^(n+1), for k != 0, down to hbar^lo."""
    out = {}
    power = ring.unit()
    n = 0
    while -(n + 1) >= lo:
        out[-(n + 1)] = ring.scale(power, Fraction(1, k) ** (n + 1) * (-1) ** n)
        power = ring.mul(power, elem)
        if not power:
            break
        n += 1
    return {p: c for p, c in out.items() if c}


def i_term(data: ToricBundleData, d, lo: int, convex: Optional[bool] = None):
    """Coefficient of q^d as {hbar power: ring element}, truncated below hbar^lo."""
    ring = data.ring
    convex = data.orientation == "convex" if convex is None else convex
    nums, dens = [], []
    for j, L in enumerate(data.L(d)):
        vj = data.v(j)
        if convex:
            # prod_{k<=L} (v + k hbar) / prod_{k<=0} (v + k hbar)
            if L >= 0:
                nums.append((vj, range(1, L + 1), ()))
            else:
                dens.append((vj, (), range(L + 1, 1)))
        else:
            # prod_{k<=L-1} (v - k hbar) / prod_{k<=-1} (v - k hbar)
            if L >= 0:
                nums.append((vj, [-k for k in range(0, L)], ()))
            else:
                dens.append((vj, (), [-k for k in range(L, 0)]))
    for j, D in enumerate(data.D(d)):
        wj = data.w(j)
        if D >= 0:
            dens.append((wj, (), range(1, D + 1)))
        else:
            nums.append((wj, range(D + 1, 1), ()))
    num = {0: ring.unit()}
    for elem, ks, _ in nums:
        for k in ks:
            num = _lp_mul(ring, num, _linear_factor(ring, elem, k), -10**9)
    deg = max(num) if num else 0
    den = {0: ring.unit()}
    for elem, _, ks in dens:
        for k in ks:
            if k == 0:
                raise NonUnitDivisor("factor without hbar in a denominator")
            den = _lp_mul(ring, den, _inverse_factor(ring, elem, k, lo - deg), lo - deg)
    return _lp_mul(ring, num, den, lo)


@dataclass
class CohJet:
    """hbar-jet with values in a cohomology ring: basis exponent -> HJet."""

    ring: CohomologyRing
    comps: Dict[Exps, HJet]
    lo: int
    hi: int
    order: Fraction
    terms: Dict[Tuple[int, ...], Dict[int, dict]] = field(default_factory=dict)

    def coefficient(self, k: int) -> Dict[Exps, NovikovSeries]:
        """ring element (series coefficients) at hbar^k."""
        return {e: j[k] for e, j in self.comps.items() if not j[k].is_zero()}

    def component(self, e: Exps) -> HJet:
        return self.comps[e]

    def text(self) -> str:
        return "\n".join(f"[{self.ring.label(e)}] {self.comps[e].text()}" for e in self.ring.basis)


def _assemble(ring, per_degree, lo, hi, order, weights) -> CohJet:
    reg = ring.reg
    comps = {}
    for e in ring.basis:
        coeffs = {}
        for k in range(lo, hi + 1):
            terms = {}
            for d, lp in per_degree.items():
                c = lp.get(k, {}).get(e)
                if c is not None and not c.is_zero():
                    terms[d] = c
            coeffs[k] = NovikovSeries.from_dict(reg, terms, order, weights)
        comps[e] = HJet(coeffs, lo, hi, "inverse", reg, order, weights)
    return CohJet(ring, comps, lo, hi, Fraction(order), dict(per_degree))


def hypergeom_I(data: ToricBundleData, q_order, hbar_window=(-4, 0), convex=None,
                check=True) -> CohJet:
    lo, hi = hbar_window
    if check:
        data.check_nonnegativity()
    per_degree = {}
    for d in data.degrees_below(q_order):
        lp = i_term(data, d, lo, convex)
        if any(k > hi for k in lp):
            raise NonNegativityViolated(f"degree {d} term has positive powers of hbar")
        per_degree[d] = lp
    return _assemble(data.ring, per_degree, lo, hi, q_order, (1,) * data.r)


def hypergeom_I_concave(data: ToricBundleData, q_order, hbar_window=(-4, 0)) -> CohJet:
    return hypergeom_I(data, q_order, hbar_window, convex=False)


def hypergeom_I_convex(data: ToricBundleData, q_order, hbar_window=(-4, 0)) -> CohJet:
    return hypergeom_I(data, q_order, hbar_window, convex=True)


def phi_series(data: ToricBundleData, order) -> NovikovSeries:
    terms = {}
    for d in data.degrees_below(order):
        L, D = data.L(d), data.D(d)
        if sum(L) != sum(D) or min(L + D, default=0) < 0:
            continue
        num = 1
        for x in L:
            num *= factorial(x)
        den = 1
        for x in D:
            den *= factorial(x)
        terms[d] = Fraction(num, den)
    return NovikovSeries.from_dict(data.reg, terms, order, (1,) * data.r)


def signed_q(s: NovikovSeries, data: ToricBundleData) -> NovikovSeries:
    """s(+-q) with +-q^d = (-1)^{sum_j L_j(d)} q^d."""
    out = {}
    for exps, c in s.items():
        d = tuple(int(x) for x in exps)
        out[exps] = c if sum(data.L(d)) % 2 == 0 else -c
    return NovikovSeries.from_dict(s.reg, out, s.order, s.weights)


# ---------------------------------------------------------------- mirror map


@dataclass
class MirrorMap:
    f0: NovikovSeries
    f: List[NovikovSeries]
    g: Dict[str, NovikovSeries]
    phi: NovikovSeries

    def is_identity(self) -> bool:
        return (self.f0.is_zero() and all(x.is_zero() for x in self.f)
                and all(x.is_zero() for x in self.g.values()) and (self.phi - 1).is_zero())


def _split_linear(s: NovikovSeries):
    """Split coefficients a + sum b_x x (x registry symbols) into a constant and per-symbol series."""
    reg = s.reg
    const, per = {}, {n: {} for n in reg.names}
    for exps, c in s.items():
        if not c.den.is_constant():
            raise NonUnitLeading(f"hbar^-1 coefficient {c} is not linear in the weights")
        for e, v in c.num.terms.items():
            v = v / c.den.constant_value()
            if sum(e) == 0:
                const[exps] = v
            elif sum(e) == 1:
                per[reg.names[e.index(1)]][exps] = v
            else:
                raise NonUnitLeading(f"hbar^-1 coefficient {c} is not linear in the weights")
    f0 = NovikovSeries.from_dict(reg, const, s.order, s.weights)
    g = {n: NovikovSeries.from_dict(reg, t, s.order, s.weights) for n, t in per.items()}
    return f0, g


def mirror_map_extract(I: CohJet):
    """Divide by phi, read the hbar^-1 asymptotics and undo the change of variables.

    Returns (MirrorMap, transformed CohJet) with J = I(Q) exp(-(F(Q) + p f(Q)) / hbar)
    where Q exp(f(Q)) = q.
    """
    ring = I.ring
    unit = (0,) * ring.r
    lead = I.coefficient(0)
    phi = lead.get(unit)
    if phi is None or phi.constant_term().is_zero():
        raise NonUnitLeading("hbar^0 coefficient has no unit component")
    if any(e != unit for e in lead):
        raise NonUnitLeading("hbar^0 coefficient is not a multiple of 1")
    try:
        phi_inv = phi.inverse()
    except NonUnitDivisor:
        raise NonUnitLeading("hbar^0 coefficient is not a unit series") from None
    comps = {e: j.map_series(lambda s: s * phi_inv) for e, j in I.comps.items()}
    if I.lo > -1:
        raise ValueError("the hbar window must reach hbar^-1")
    first = {e: comps[e][-1] for e in ring.basis}
    F = first[unit]
    fs = []
    for i in range(ring.r):
        e = tuple(1 if k == i else 0 for k in range(ring.r))
        if e in first:
            fs.append(first[e])
        else:
            fs.append(F * 0)
    for e, s in first.items():
        if sum(e) > 1 and not s.is_zero():
            raise NonUnitLeading(f"hbar^-1 coefficient has a component along {ring.label(e)}")
    f0, g = _split_linear(F)
    mm = MirrorMap(f0, fs, g, phi)
    # undo the change of variables
    qmap = {}
    if any(not x.is_zero() for x in fs):
        if ring.r != 1:
            raise NotImplementedError("inverse mirror maps are implemented for one Novikov variable")
        qmap = inverse_qmap({0: fs[0]})
    sub = {e: (substitute(j, qmap) if qmap else j) for e, j in comps.items()}
    Fq = substitute(F, qmap) if qmap else F
    fq = [substitute(x, qmap) if qmap else x for x in fs]
    # exponent X = F(Q) + sum p_i f_i(Q) as a ring element with series coefficients
    X = {unit: Fq}
    for i in range(ring.r):
        if not fq[i].is_zero():
            X = ring.add(X, {k: c * fq[i] for k, c in ring.gen(i).items()})
    lo, hi = I.lo, I.hi
    # exp(-X / hbar) as {hbar power: element}
    E = {0: ring.const(F * 0 + 1)}
    power = ring.const(F * 0 + 1)
    for n in range(1, -lo + 1):
        power = ring.mul(power, X)
        if not power:
            break
        E[-n] = ring.scale(power, Fraction((-1) ** n, factorial(n)))
    # product
    per_power: Dict[int, dict] = {}
    for k in range(lo, hi + 1):
        elem = {e: sub[e][k] for e in ring.basis if not sub[e][k].is_zero()}
        if not elem:
            continue
        for n, ex in E.items():
            kk = k + n
            if kk < lo:
                continue
            per_power[kk] = ring.add(per_power.get(kk, {}), ring.mul(elem, ex))
    order = min(j.order for j in sub.values())
    weights = (1,) * ring.r
    out = {}
    for e in ring.basis:
        coeffs = {k: per_power.get(k, {}).get(e, NovikovSeries.zero(ring.reg, order, weights))
                  for k in range(lo, hi + 1)}
        out[e] = HJet(coeffs, lo, hi, "inverse", ring.reg, order, weights)
    return mm, CohJet(ring, out, lo, hi, order)


# ---------------------------------------------------------------- quantum relation


def _apply_divisor_operator(data: ToricBundleData, jet: Dict[int, dict], j: int, order) -> Dict[int, dict]:
    """(v_j with p_i -> p_i + hbar q_i d/dq_i) applied to a {power: element} jet."""
    ring = data.ring
    sign = 1 if data.orientation == "convex" else -1
    vj = data.v(j)
    out: Dict[int, dict] = {}
    for k, elem in jet.items():
        out[k] = ring.add(out.get(k, {}), ring.mul(vj, elem))
        for i in range(data.r):
            c = sign * data.l[i][j]
            if not c:
                continue
            der = {e: s.qderiv(i).scale(c) for e, s in elem.items()}
            der = {e: s for e, s in der.items() if not s.is_zero()}
            if der:
                out[k + 1] = ring.add(out.get(k + 1, {}), der)
    return {k: v for k, v in out.items() if v}


def quantum_relation_extract(I: CohJet, data: ToricBundleData, divisors: Sequence[int]):
    """hbar^0 part of D_{v_j1} ... D_{v_jl} I, the quantum product v_j1 o ... o v_jl.

    Returns (phi_signed, product element, classical product) with
    product = phi_signed * classical.
    """
    ring = data.ring
    if I.lo > -len(divisors):
        raise ValueError("the hbar window is too short for this many divisor operators")
    jet = {k: I.coefficient(k) for k in range(I.lo, I.hi + 1)}
    jet = {k: v for k, v in jet.items() if v}
    for j in divisors:
        jet = _apply_divisor_operator(data, jet, j, I.order)
    result = jet.get(0, {})
    classical = ring.unit()
    for j in divisors:
        classical = ring.mul(classical, data.v(j))
    # phi = result / classical, read off a component where classical has a unit coefficient
    phi = None
    for e, c in classical.items():
        if not c.is_zero():
            s = result.get(e)
            if s is None:
                phi = NovikovSeries.zero(ring.reg, I.order, (1,) * ring.r)
            else:
                phi = s.scale(c.inverse())
            break
    if phi is None:
        raise NonUnitLeading("classical product vanishes")
    expected = ring.scale(classical, phi) if classical else {}
    if not ring.equal({e: s for e, s in result.items()}, expected):
        raise NonUnitLeading("quantum product is not proportional to the classical product")
    return phi, result, classical


# ---------------------------------------------------------------- multiple covers


def multiple_cover_residue(d: int, phi: Sequence, reg: Registry, hbar: str = "hbar") -> RatFunc:
    """Contour integral of phi(p) dp / (p^2 (p + d hbar)^2) around all finite poles.

    Read off the Laurent expansion at p = infinity: this is the coefficient of
    1/p, i.e. minus the residue at infinity.  ``phi`` lists polynomial
    coefficients from p^0 upward.
    """
    h = reg.gen(hbar)
    acc = reg.const(0)
    # 1/(p + d h)^2 = p^-2 sum_n (n + 1) (-d h / p)^n
    for k, c in enumerate(phi):
        c = reg.coerce(c)
        n = k - 3
        if n < 0 or c.is_zero():
            continue
        acc = acc + c * (n + 1) * (h * (-d)) ** n
    return acc


def residue_at_zero(d: int, phi: Sequence, reg: Registry, hbar: str = "hbar") -> RatFunc:
    """Residue at p = 0 of phi(p) / (p^2 (p + d hbar)^2); phi as power-series coefficients."""
    h = reg.gen(hbar)
    # 1/(p + d h)^2 = (d h)^-2 sum_n (n + 1) (-p / (d h))^n ; need p^1 overall from phi_k p^k
    acc = reg.const(0)
    dh = h * d
    for k in range(2):
        if k >= len(phi):
            break
        n = 1 - k
        acc = acc + reg.coerce(phi[k]) * (n + 1) * (-dh.inverse()) ** n / (dh * dh)
    return acc


def _ceil(order) -> int:
    return -((-Fraction(order).numerator) // Fraction(order).denominator)


def yukawa_series(order) -> NovikovSeries:
    """sum_d q^d times the cover residue of p^3 (the coupling <P o P, P>)."""
    reg = Registry(("hbar",))
    terms = {}
    for d in range(1, _ceil(order)):
        r = multiple_cover_residue(d, [0, 0, 0, 1], reg)
        if not r.is_constant():
            raise ValueError("cover residue of p^3 depends on hbar")
        terms[d] = r.constant_value()
    return NovikovSeries.from_dict(Registry(()), terms, order)


def genus0_cover_potential(order) -> Tuple[NovikovSeries, NovikovSeries]:
    """From the p = 0 residue of exp(p t / hbar): returns (F0, q dF0/dq) with
    sum_d q^d Res_0 = (t q dF0/dq - 2 F0) / hbar^3."""
    reg = Registry(("hbar", "t"))
    h, t = reg.gen("hbar"), reg.gen("t")
    f0, f1 = {}, {}
    for d in range(1, _ceil(order)):
        res = residue_at_zero(d, [reg.const(1), t / h], reg) * h * h * h
        num = res.num
        const = num.terms.get((0, 0), Fraction(0)) / res.den.constant_value()
        lin = num.terms.get((0, 1), Fraction(0)) / res.den.constant_value()
        f0[d] = -const / 2
        f1[d] = lin
    empty = Registry(())
    return (NovikovSeries.from_dict(empty, f0, order), NovikovSeries.from_dict(empty, f1, order))


# ---------------------------------------------------------------- built-in data


def conifold_data(reg: Optional[Registry] = None) -> ToricBundleData:
    """O(-1) + O(-1) over CP^1 with the torus reduced to one weight lambda."""
    reg = reg or Registry(("lam",))
    lam = reg.gen("lam")
    ring = CohomologyRing(reg, ["p"], [[-(lam * lam), 0, 1]])
    return ToricBundleData(ring, [[1, 1]], [[1, 1]], [lam, -lam], [reg.const(0), reg.const(0)],
                           "concave", name="conifold")


# ---------------------------------------------------------------- genus one end to end


def relation_from_I(data: ToricBundleData, order, divisors: Sequence[int], hbar_window=None):
    """p^n = sum_k c_k p^k read off the I-series, for one generator and divisors v_j = -+p.

    Returns the coefficient list c_0..c_{n-1}.
    """
    ring = data.ring
    if ring.r != 1:
        raise NotImplementedError("relations are read off for a single generator")
    n = ring.degrees[0]
    if len(divisors) != n:
        raise ValueError(f"need {n} divisors to reach the top power of {ring.gens[0]}")
    sign = 1
    for j in divisors:
        if not data.lam_prime[j].is_zero() or abs(data.l[0][j]) != 1:
            raise NotImplementedError("divisor classes must be -+p")
        sign *= data.l[0][j] * (1 if data.orientation == "convex" else -1)
    window = hbar_window or (-n, 0)
    I = hypergeom_I(data, order, window, convex=data.orientation == "convex")
    _, result, _ = quantum_relation_extract(I, data, divisors)
    zero = NovikovSeries.zero(data.reg, I.order)
    return [result.get((k,), zero).scale(sign) for k in range(n)]


def toric_genus1_pipeline(data: ToricBundleData, pairing, divisors, points, tangent_weights,
                          order=8, start=None):
    """I-series -> relation -> frame -> equivariant dG, raising the working order
    until dG is known to ``order``.

    ``points[a]`` is the q = 0 eigenvalue of p at the fixed point whose tangent
    weights are ``tangent_weights[a]``.
    """
    from .elliptic import EllipticInput, c_minus1_from_weights, elliptic_breakdown
    from .frame import build_frame, r_ladder
    from .frobenius import FrobeniusData

    target = Fraction(order)
    work = int(target) + 2 if start is None else int(start)
    reg = data.reg
    while True:
        rel = relation_from_I(data, work, divisors)
        fd = FrobeniusData.from_relation(reg, data.ring.gens[0], rel, pairing, rel[0].order,
                                         q_degrees=(data.c1_pairing((1,)),))
        frame = build_frame(fd, "mod-q")
        r_ladder(frame, K=1)
        weights = []
        for ev in frame.split.eigenvalues["logq1"]:
            c = ev.constant_term()
            match = [a for a, pt in enumerate(points) if reg.coerce(pt) == c]
            if len(match) != 1:
                raise ValueError(f"no unique fixed point with eigenvalue {c}")
            weights.append(tangent_weights[match[0]])
        cs = c_minus1_from_weights(weights)
        parts = elliptic_breakdown(EllipticInput(frame, cs, "equivariant"))
        dG = parts["total"]
        if min(s.order for s in dG.components.values()) >= target:
            break
        work += 2
    return {"relation": [c.truncate(target) for c in rel], "frobenius": fd, "frame": frame,
            "c_minus1": cs, "dG": {n: s.truncate(target) for n, s in dG.components.items()},
            "breakdown": parts, "working_order": work}


def elliptic_covers(dG_logq: NovikovSeries) -> NovikovSeries:
    """Primitive in log q of the q-dependent part of the d log q coefficient."""
    c = dG_logq.constant_term()
    return integrate_dlog(dG_logq - c)


def conifold_pipeline(order=8, start=None):
    from .series import series_log

    data = conifold_data()
    reg = data.reg
    lam = reg.gen("lam")
    inv = (lam * lam).inverse()
    pairing = [[reg.const(0), inv], [inv, reg.const(0)]]
    out = toric_genus1_pipeline(data, pairing, [0, 1], [lam, -lam],
                                [[lam * 2, -lam, -lam], [lam * -2, lam, lam]], order, start)
    target = Fraction(order)
    covers = elliptic_covers(out["dG"]["logq1"])
    one = NovikovSeries.constant(reg, 1, target)
    expected = series_log(one - NovikovSeries.monomial(reg, 1, target)).scale(Fraction(-1, 12))
    out.update({
        "constants": [c * Fraction(-1, 12) for c in out["c_minus1"]],
        "covers": covers,
        "covers_expected": expected,
        "covers_match": covers.agrees(expected),
    })
    return out
