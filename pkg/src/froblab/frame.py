"""Canonical frames of semisimple Frobenius data and the asymptotic R-matrix ladder.

Pipeline: :func:`eigen_split` (Newton polygon + q-adic Newton lifting of the
pilot characteristic polynomial), :func:`canonical_coordinates`,
:func:`psi_matrix`, :func:`hessians`, :func:`r_ladder`,
:func:`assemble_S_and_verify`.

Gauge.  The columns of Psi are the idempotents rescaled by
``sqrt(Delta_a / e_a)`` where ``e_a`` is the leading coefficient of the Hessian
``Delta_a = 1 / eta(eps_a, eps_a)``.  The square root therefore always exists
over K (up to a lattice enlargement) and ``Psi^T eta Psi = diag(1/e_a)`` is a
constant matrix ``G``.  A genuinely orthonormal frame would need ``sqrt(e_a)``,
which usually lies outside K; since the two frames differ by a constant
diagonal, the R-matrices agree up to conjugation by it and ``G R`` is
symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (ConstantRequired, InconsistentOffDiagonal, NonCommutingDirections,
                     NonIntegrableDiagonal, NonUnitDivisor, NormNotASquare, NotClosed,
                     NotSemisimpleAtOrigin, RootNotInField, SingularJacobian)
from .exact import RatFunc, ratfunc_sqrt
from .frobenius import FrobeniusData
from .linalg import Matrix, mat_inv, mat_mul, mat_vec, transpose
from .series import ExtFunction, NovikovSeries, OneForm, dlog, series_pow

MAX_LATTICE = 6


# ---------------------------------------------------------------- polynomial roots


def _charpoly(A: Matrix) -> List[NovikovSeries]:
    """Coefficients c_0..c_n (c_n = 1) of det(x - A), Faddeev-LeVerrier."""
    n = len(A)
    one = A[0][0] * 0 + 1
    zero = A[0][0] * 0
    coeffs = [None] * (n + 1)
    coeffs[n] = one
    M = [[zero for _ in range(n)] for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        c_prev = coeffs[n - k + 1]
        AM = mat_mul(A, M) if k > 1 else [[zero for _ in range(n)] for _ in range(n)]
        M = [[AM[i][j] + (c_prev if i == j else zero) for j in range(n)] for i in range(n)]
        AM = mat_mul(A, M)
        tr = AM[0][0]
        for i in range(1, n):
            tr = tr + AM[i][i]
        coeffs[n - k] = tr.scale(Fraction(-1, k))
    return coeffs


def _poly_eval(coeffs: Sequence[NovikovSeries], x: NovikovSeries) -> NovikovSeries:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs):
    return [c.scale(k) for k, c in enumerate(coeffs)][1:]


def field_roots(coeffs: Sequence[RatFunc]) -> List[Tuple[RatFunc, int]]:
    """Roots in K of sum coeffs[k] y^k with multiplicities (roots outside K are dropped)."""
    while coeffs and coeffs[-1].is_zero():
        coeffs = coeffs[:-1]
    deg = len(coeffs) - 1
    if deg <= 0:
        return []
    if deg == 1:
        return [(-coeffs[0] / coeffs[1], 1)]
    if deg == 2:
        a, b, c = coeffs[2], coeffs[1], coeffs[0]
        disc = b * b - a * c * 4
        if disc.is_zero():
            return [(-b / (a * 2), 2)]
        try:
            s = ratfunc_sqrt(disc)
        except RootNotInField:
            return []
        return [((-b + s) / (a * 2), 1), ((-b - s) / (a * 2), 1)]
    return _sympy_roots(coeffs)


def _sympy_roots(coeffs):
    import sympy

    reg = coeffs[0].reg
    syms = sympy.symbols(reg.names) if reg.nvars else ()
    if reg.nvars == 1:
        syms = (syms,) if not isinstance(syms, tuple) else syms
    y = sympy.Symbol("_y")

    def expr(p):
        return sum(sympy.Rational(c.numerator, c.denominator)
                   * sympy.Mul(*[s**k for s, k in zip(syms, e)]) for e, c in p.terms.items())

    poly = sum(expr(c.num) / expr(c.den) * y**k for k, c in enumerate(coeffs))
    num = sympy.numer(sympy.together(poly))
    _, factors = sympy.factor_list(num, y)
    out = []
    for f, mult in factors:
        P = sympy.Poly(f, y)
        if P.degree() != 1:
            continue
        a, b = P.all_coeffs()
        root = sympy.together(-b / a)
        out.append((_from_expr(reg, syms, root), mult))
    return out


def _from_expr(reg, syms, e):
    import sympy

    n, d = sympy.fraction(sympy.together(e))

    def conv(x):
        P = sympy.Poly(x, *syms) if syms else sympy.Poly(x, sympy.Symbol("_c"))
        terms = {}
        for mon, c in P.terms():
            c = sympy.Rational(c)
            terms[tuple(mon) if syms else ()] = Fraction(int(c.p), int(c.q))
        return reg.poly(terms)

    from .exact import ratfunc_normalize
    return ratfunc_normalize(conv(n), conv(d))


# ---------------------------------------------------------------- eigen split


@dataclass
class EigenSplit:
    data: FrobeniusData
    eigenvalues: Dict[str, List[NovikovSeries]]
    vectors: List[List[NovikovSeries]]
    norms: List[NovikovSeries]
    pilot: str

    @property
    def rank(self):
        return len(self.vectors)


def _leading_roots(coeffs: List[NovikovSeries], max_lattice: int, lattice: Optional[int]):
    """Leading terms (c, s) of the roots, from the lower Newton polygon."""
    n = len(coeffs) - 1
    reg = coeffs[0].reg
    nvars = coeffs[0].nvars
    zero_roots = 0
    while coeffs[zero_roots].is_zero():
        zero_roots += 1
    if zero_roots > 1:
        raise NotSemisimpleAtOrigin("the zero eigenvalue is repeated")
    pts = [(k, coeffs[k].valuation()) for k in range(zero_roots, n + 1) if not coeffs[k].is_zero()]
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    leads = []
    if zero_roots:
        leads.append((reg.const(0), None))
    for (k1, v1), (k2, v2) in zip(hull, hull[1:]):
        s = Fraction(v1 - v2, k2 - k1)
        if nvars > 1 and s != 0:
            raise NotSemisimpleAtOrigin("fractional splitting with several Novikov variables")
        den = s.denominator
        if den > max_lattice or (lattice is not None and lattice % den):
            raise NotSemisimpleAtOrigin(
                f"eigenvalues of valuation {s} need lattice denominator {den}")
        edge = []
        for k in range(k1, k2 + 1):
            c = coeffs[k]
            val = v1 - s * (k - k1)
            if c.is_zero() or c.valuation() != val:
                edge.append(reg.const(0))
                continue
            if nvars == 1:
                edge.append(c.coeff((val,)))
            else:
                edge.append(c.constant_term())
        roots = field_roots(edge)
        for r, m in roots:
            if m > 1:
                raise NotSemisimpleAtOrigin(f"leading eigenvalue {r} q^{s} is repeated")
        if len(roots) < k2 - k1:
            raise RootNotInField("leading eigenvalues are not in the coefficient field")
        for r, m in roots:
            leads.append((r, s))
    return leads


def _newton_root(coeffs, lead, order, weights):
    reg = coeffs[0].reg
    c, s = lead
    if s is None:
        return NovikovSeries.zero(reg, order, weights)
    x = NovikovSeries.monomial(reg, (s,) * len(weights), order, c, weights)
    deriv = _poly_deriv(coeffs)
    loss = None
    for _ in range(64):
        dp = _poly_eval(deriv, x)
        try:
            inv = dp.inverse(allow_shift=True)
        except NonUnitDivisor:
            raise NotSemisimpleAtOrigin("derivative of the characteristic polynomial vanishes") from None
        loss = dp.valuation()
        delta = _poly_eval(coeffs, x) * inv
        target = order - loss
        if delta.truncate(target).is_zero():
            return x.with_order(target)
        x = (x - delta).truncate(target).with_order(order)
    raise NotSemisimpleAtOrigin("Newton lifting did not stabilise")


def eigen_split(data: FrobeniusData, order=None, pilot: Optional[str] = None,
                max_lattice: int = MAX_LATTICE, lattice: Optional[int] = None) -> EigenSplit:
    """Simultaneous eigen-decomposition of the product operators.

    ``lattice`` forces the exponent lattice denominator; ``max_lattice`` caps
    the enlargement allowed by the Newton polygon.
    """
    order = data.order if order is None else Fraction(order)
    names = data.coordinates()
    pilot = pilot or names[1]
    A = data.direction_matrix(pilot)
    coeffs = _charpoly(A)
    leads = _leading_roots(coeffs, max_lattice, lattice)
    roots = [_newton_root(coeffs, lead, order, data.weights) for lead in leads]
    if len(roots) != data.rank:
        raise NotSemisimpleAtOrigin("pilot operator does not split into simple eigenvalues")
    # spectral projectors applied to the unit give the idempotents
    unit = data.basis_vector(0)
    vectors = []
    for a, xa in enumerate(roots):
        v = unit
        den = None
        for b, xb in enumerate(roots):
            if b == a:
                continue
            Av = mat_vec(A, v)
            v = [y - xb * z for y, z in zip(Av, v)]
            diff = xa - xb
            den = diff if den is None else den * diff
        inv = den.inverse(allow_shift=True) if den is not None else None
        vectors.append([y * inv for y in v] if inv is not None else v)
    eta = data.eta_series()
    norms = [_pair(eta, v, v) for v in vectors]
    eig: Dict[str, List[NovikovSeries]] = {}
    for name in names:
        if name == pilot:
            eig[name] = roots
            continue
        An = data.direction_matrix(name)
        vals = []
        for v, nv in zip(vectors, norms):
            Av = mat_vec(An, v)
            xi = _pair(eta, v, Av) * nv.inverse(allow_shift=True)
            for comp, (y, z) in enumerate(zip(Av, v)):
                if not y.agrees(xi * z):
                    raise NonCommutingDirections(
                        f"direction {name} does not preserve eigenline {len(vals)} (component {comp})")
            vals.append(xi)
        eig[name] = vals
    for a, v in enumerate(vectors):
        Av = mat_vec(A, v)
        for comp, (y, z) in enumerate(zip(Av, v)):
            if not y.agrees(roots[a] * z):
                raise NonCommutingDirections(f"pilot eigenvector {a} failed verification")
    return EigenSplit(data, eig, vectors, norms, pilot)


def _pair(eta: Matrix, a, b) -> NovikovSeries:
    acc = None
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if eta[i][j].is_zero() or y.is_zero():
                continue
            t = x * y * eta[i][j]
            acc = t if acc is None else acc + t
    if acc is None:
        return a[0] * 0
    return acc


# ---------------------------------------------------------------- coordinates


def integrate_form(form: OneForm, allow_log: bool = True, what: str = "form"):
    """Primitive of a closed 1-form in the {dt0, dlog q_i} co-frame.

    Constant components become t0 / log q_i terms (only if ``allow_log``);
    every monomial is checked against all components (closedness).
    Returns an ExtFunction (or a NovikovSeries when no linear part arises).
    """
    names = form.coframe
    comps = [form[n] for n in names]
    reg = comps[0].reg
    weights = comps[0].weights
    N = 1
    for c in comps:
        N = lcm(N, c.N)
    comps = [c.rebase(N) for c in comps]
    order = min(c.order for c in comps)
    linear = {}
    t0 = comps[0]
    if any(any(e) for e in t0.terms):
        raise NotClosed(f"{what}: dt0 component depends on q")
    c0 = t0.constant_term()
    if not c0.is_zero():
        linear["t0"] = c0
    out = {}
    zero = reg.const(0)
    keys = set()
    for c in comps[1:]:
        keys |= {e for e in c.terms if c._deg(e) < order}
    for e in sorted(keys):
        if not any(e):
            continue
        i = next(k for k, x in enumerate(e) if x)
        val = comps[1 + i].terms.get(e, zero) / Fraction(e[i], N)
        for j, c in enumerate(comps[1:]):
            if c.terms.get(e, zero) != val * Fraction(e[j], N):
                raise NotClosed(f"{what}: mixed partials disagree at exponent "
                                f"{[str(Fraction(x, N)) for x in e]}")
        out[e] = val
    for j, c in enumerate(comps[1:]):
        cst = c.constant_term()
        if not cst.is_zero():
            if not allow_log:
                raise NonIntegrableDiagonal(f"{what}: constant dlog q{j + 1} component {cst}")
            linear[f"logq{j + 1}"] = cst
    series = NovikovSeries(reg, out, order, N, weights)
    if linear:
        return ExtFunction(linear, series)
    return series


def canonical_coordinates(split: EigenSplit, rule: str = "mod-q"):
    """(u, du) with du_a = dt0 + sum xi_a^(i) dlog q_i.

    Integration constants are zero: this is the mod-q rule and, on every
    graded example, the only quasi-homogeneous choice as well.
    """
    names = split.data.coordinates()
    du = []
    u = []
    for a in range(split.rank):
        comps = {}
        for name in names:
            if name == "t0":
                tmpl = split.eigenvalues[names[1]][a]
                comps[name] = NovikovSeries.constant(tmpl.reg, 1, tmpl.order, tmpl.weights)
            else:
                comps[name] = split.eigenvalues[name][a]
        form = OneForm(comps)
        du.append(form)
        f = integrate_form(form, allow_log=True, what=f"du_{a}")
        u.append(f if isinstance(f, ExtFunction) else ExtFunction({}, f))
    return u, du


# ---------------------------------------------------------------- frame


@dataclass
class CanonicalFrame:
    data: FrobeniusData
    split: EigenSplit
    u: List[ExtFunction]
    du: List[OneForm]
    psi: Matrix
    gram: List[RatFunc]
    delta: List[NovikovSeries]
    rule: str = "mod-q"
    R: List[Matrix] = field(default_factory=list)
    constants: Dict[Tuple[int, int], RatFunc] = field(default_factory=dict)

    @property
    def rank(self):
        return len(self.u)

    @property
    def coords(self):
        return self.data.coordinates()

    def psi_inverse(self) -> Matrix:
        """G^{-1} Psi^T eta."""
        eta = self.data.eta_series()
        pt = mat_mul(transpose(self.psi), eta)
        return [[x.scale(self.gram[i].inverse()) for x in row] for i, row in enumerate(pt)]

    def connection(self) -> Dict[str, Matrix]:
        """Psi^{-1} d Psi per coordinate."""
        inv = self.psi_inverse()
        out = {}
        for name in self.coords:
            if name == "t0":
                dpsi = [[x * 0 for x in row] for row in self.psi]
            else:
                i = int(name[4:]) - 1
                dpsi = [[x.qderiv(i) for x in row] for row in self.psi]
            out[name] = mat_mul(inv, dpsi)
        return out

    def du_component(self, a: int, name: str) -> NovikovSeries:
        return self.du[a][name]


def psi_matrix(split: EigenSplit):
    """Columns eps_a sqrt(Delta_a / e_a); returns (Psi, G diagonal, raw Hessians)."""
    cols = []
    gram = []
    deltas = []
    for v, nv in zip(split.vectors, split.norms):
        try:
            delta = nv.inverse(allow_shift=True)
        except NonUnitDivisor:
            raise NormNotASquare("idempotent has zero norm") from None
        _, lead = delta.lowest_term()
        try:
            scale = series_pow(delta.scale(lead.inverse()), Fraction(1, 2))
        except RootNotInField as exc:
            raise NormNotASquare(str(exc)) from None
        cols.append([x * scale for x in v])
        gram.append(lead.inverse())
        deltas.append(delta)
    return transpose(cols), gram, deltas


def build_frame(data: FrobeniusData, rule: str = "mod-q", order=None, pilot=None,
                max_lattice: int = MAX_LATTICE, lattice=None) -> CanonicalFrame:
    split = eigen_split(data, order, pilot=pilot, max_lattice=max_lattice, lattice=lattice)
    u, du = canonical_coordinates(split, rule)
    psi, gram, deltas = psi_matrix(split)
    return CanonicalFrame(data, split, u, du, psi, gram, deltas, rule)


def hessians(frame: CanonicalFrame, normalize: bool = False) -> List[NovikovSeries]:
    """Delta_a = 1 / eta(eps_a, eps_a).

    With ``normalize`` each Hessian is divided by its q = 0 value (the
    fixed-point Euler class in equivariant examples).
    """
    if not normalize:
        return list(frame.delta)
    out = []
    for d in frame.delta:
        c = d.constant_term()
        if c.is_zero():
            raise ValueError("Hessian vanishes at q = 0; normalization undefined")
        out.append(d.scale(c.inverse()))
    return out


# ---------------------------------------------------------------- R ladder


def _du_difference(frame, i, j, name):
    return frame.du[i][name] - frame.du[j][name]


def _pick_direction(frame, i, j):
    for name in frame.coords:
        d = _du_difference(frame, i, j, name)
        if d.is_zero():
            continue
        try:
            return name, d.inverse(allow_shift=True)
        except NonUnitDivisor:
            continue
    raise InconsistentOffDiagonal(f"no direction separates branches {i} and {j}")


def _homogeneous_constant_allowed(reg) -> bool:
    return any(d != 0 for d in reg.degrees)


def r_ladder(frame: CanonicalFrame, K: int = 1, rule: Optional[str] = None,
             constants: Optional[Dict[Tuple[int, int], object]] = None) -> List[Matrix]:
    """R^(0)..R^(K-1) from [dU, R^(k)] = (d + Psi^{-1} dPsi) R^(k-1), R^(-1) = 1.

    ``rule`` is 'mod-q' (diagonal entries have no q^0 term) or 'conformal'
    (diagonal constant of weight -(k+1); forced to zero over an ungraded field,
    otherwise it must be supplied in ``constants[(k, a)]``).
    """
    rule = rule or frame.rule
    constants = dict(constants or {})
    n = frame.rank
    conn = frame.connection()
    names = frame.coords
    ref = frame.psi[0][0]
    zero = NovikovSeries.zero(ref.reg, ref.order, ref.weights)
    one = zero + 1
    prev = [[one if a == b else zero for b in range(n)] for a in range(n)]
    ladder = []
    for k in range(K):
        # covariant derivative of the previous level along each coordinate
        if k == 0:
            D = {name: conn[name] for name in names}
        else:
            D = {}
            for name in names:
                if name == "t0":
                    der = [[x * 0 for x in row] for row in prev]
                else:
                    i = int(name[4:]) - 1
                    der = [[x.qderiv(i) for x in row] for row in prev]
                cp = mat_mul(conn[name], prev)
                D[name] = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(der, cp)]
        cur = [[zero for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                name, inv = _pick_direction(frame, i, j)
                val = D[name][i][j] * inv
                for other in names:
                    lhs = D[other][i][j]
                    rhs = val * _du_difference(frame, i, j, other)
                    if not lhs.agrees(rhs):
                        raise InconsistentOffDiagonal(
                            f"level {k}, entry ({i},{j}): directions {name} and {other} disagree")
                cur[i][j] = val
        for i in range(n):
            comps = {}
            for name in names:
                acc = zero
                for l in range(n):
                    if l == i:
                        continue
                    acc = acc - conn[name][i][l] * cur[l][i]
                comps[name] = acc
            form = OneForm(comps)
            if not form["t0"].is_zero():
                raise NonIntegrableDiagonal(f"level {k}, branch {i}: dR depends on t0")
            prim = integrate_form(form, allow_log=False, what=f"R^({k})_{i}{i}")
            c = _diagonal_constant(frame, rule, k, i, constants, prim)
            cur[i][i] = prim + NovikovSeries.constant(prim.reg, c, prim.order, prim.weights)
        ladder.append(cur)
        prev = cur
    frame.R = ladder
    return ladder


def _diagonal_constant(frame, rule, k, i, constants, prim):
    if (k, i) in constants:
        return frame.data.reg.coerce(constants[(k, i)])
    if rule == "mod-q":
        return frame.data.reg.const(0)
    if rule == "conformal":
        if _homogeneous_constant_allowed(frame.data.reg):
            raise ConstantRequired(
                f"conformal rule: constant of weight {-(k + 1)} for level {k}, branch {i} must be supplied")
        return frame.data.reg.const(0)
    raise ValueError(f"unknown normalization rule {rule!r}")


def symmetry_defect(frame: CanonicalFrame, R: Optional[Matrix] = None):
    """First (i, j) where G R fails to be symmetric, or None."""
    R = R if R is not None else frame.R[0]
    n = frame.rank
    for i in range(n):
        for j in range(i + 1, n):
            a = R[i][j].scale(frame.gram[i])
            b = R[j][i].scale(frame.gram[j])
            if not a.agrees(b):
                return (i, j)
    return None


def orthonormal_R(frame: CanonicalFrame, R: Matrix, branch_roots: Sequence[RatFunc]) -> Matrix:
    """Conjugate R into a frame rescaled by constants c_a (c_a^2 = 1/gram_a supplied by caller)."""
    n = frame.rank
    return [[R[i][j].scale(branch_roots[i] / branch_roots[j]) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------- S-matrix check


@dataclass
class ResidualReport:
    ok: bool
    level: Optional[int] = None
    direction: Optional[str] = None
    entry: Optional[Tuple[int, int]] = None
    value: Optional[str] = None

    def __bool__(self):
        return self.ok


def assemble_S_and_verify(frame: CanonicalFrame, K: int = 2, ladder=None) -> ResidualReport:
    """Check hbar dS~ + S~ dU - A S~ = 0 with S~ = Psi (1 + hbar R^(0) + ... + hbar^K R^(K-1)).

    exp(U/hbar) is conjugated away, so only polynomial hbar-jets occur; the
    equation is checked at hbar^0 .. hbar^K.
    """
    ladder = ladder if ladder is not None else frame.R
    if len(ladder) < K:
        raise ValueError(f"ladder has {len(ladder)} levels, {K} needed")
    n = frame.rank
    ref = frame.psi[0][0]
    zero = NovikovSeries.zero(ref.reg, ref.order, ref.weights)
    one = zero + 1
    T = [[[one if a == b else zero for b in range(n)] for a in range(n)]]
    T += [ladder[k] for k in range(K)]
    S = [mat_mul(frame.psi, t) for t in T]  # coefficients of hbar^0..hbar^K
    for name in frame.coords:
        A = frame.data.direction_matrix(name)
        dU = [frame.du[a][name] for a in range(n)]
        for level in range(K + 1):
            # hbar^level: d S_{level-1} + S_level dU - A S_level
            AS = mat_mul(A, S[level])
            for i in range(n):
                for j in range(n):
                    r = S[level][i][j] * dU[j] - AS[i][j]
                    if level > 0:
                        s = S[level - 1][i][j]
                        r = r + (s * 0 if name == "t0" else s.qderiv(int(name[4:]) - 1))
                    if not r.is_zero():
                        return ResidualReport(False, level, name, (i, j), r.text())
    return ResidualReport(True)


# ---------------------------------------------------------------- dR from Hessians


def du_jacobian(du: Sequence[OneForm]) -> Matrix:
    names = du[0].coframe
    if len(names) != len(du):
        raise SingularJacobian(
            f"{len(du)} canonical coordinates against {len(names)} co-frame directions")
    return [[form[name] for name in names] for form in du]


def canonical_partials(form_or_series, du: Sequence[OneForm]):
    """Components of a 1-form (or of d f for a series f) in the du co-frame."""
    J = du_jacobian(du)
    try:
        Jinv = mat_inv(J, allow_shift=True)
    except NonUnitDivisor:
        raise SingularJacobian("du co-frame is not invertible at the working order") from None
    names = du[0].coframe
    if isinstance(form_or_series, OneForm):
        comps = [form_or_series[nm] for nm in names]
    else:
        f = form_or_series
        comps = [f * 0 if nm == "t0" else f.qderiv(int(nm[4:]) - 1) for nm in names]
    # omega = sum_k w_k dx_k = sum_a (J^{-T} w)_a du_a, since dx = J^{-1} du
    out = []
    for a in range(len(du)):
        acc = None
        for k in range(len(names)):
            t = Jinv[k][a] * comps[k]
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def dr_from_hessians(deltas: Sequence[NovikovSeries], du: Sequence[OneForm]) -> List[OneForm]:
    """dR_a = 1/4 sum_b (d_a log Delta_b)(d_b log Delta_a)(du_b - du_a)."""
    n = len(deltas)
    names = du[0].coframe
    logs = []
    for d in deltas:
        comps = {nm: (d * 0 if nm == "t0" else dlog(d, int(nm[4:]) - 1)) for nm in names}
        logs.append(canonical_partials(OneForm(comps), du))  # logs[b][a] = d_a log Delta_b
    out = []
    for a in range(n):
        acc = None
        for b in range(n):
            if b == a:
                continue
            coef = (logs[b][a] * logs[a][b]).scale(Fraction(1, 4))
            form = OneForm({nm: coef * (du[b][nm] - du[a][nm]) for nm in names})
            acc = form if acc is None else acc + form
        if acc is None:
            acc = OneForm({nm: du[a][nm] * 0 for nm in names})
        out.append(acc)
    return out


def diagonal_forms(frame: CanonicalFrame, level: int = 0) -> List[OneForm]:
    """dR^(level)_aa as 1-forms (from the ladder)."""
    R = frame.R[level]
    out = []
    for a in range(frame.rank):
        s = R[a][a]
        out.append(OneForm({nm: (s * 0 if nm == "t0" else s.qderiv(int(nm[4:]) - 1)) for nm in frame.coords}))
    return out
