"""Regression suite: one check per acceptance criterion.

Each check takes a q-order (``None`` for its default) and a ``perturb`` flag
that deliberately corrupts the expected value, so the reporting path for
failures can itself be tested.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Tuple

from .exact import Registry
from .series import NovikovSeries, series_log, series_pow

Check = Tuple[bool, str]


def _bump(perturb: bool) -> Fraction:
    return Fraction(1, 997) if perturb else Fraction(0)


def _escalate(build, target, start=None, step=2):
    """Call build(work) with growing working order until its .order-bearing result reaches target."""
    work = int(target) + 2 if start is None else start
    while True:
        out = build(work)
        if out[0] >= target:
            return out[1:] + (work,)
        work += step


# ---------------------------------------------------------------- CP1 data


def cp1_frame(order, equivariant: bool):
    """Canonical frame with R^(0), R^(1) and dG for CP1 (optionally equivariant)."""
    from .elliptic import EllipticInput, c_minus1_from_weights, elliptic_breakdown
    from .frame import build_frame, r_ladder
    from .frobenius import FrobeniusData

    reg = Registry(("lam",)) if equivariant else Registry(())

    def build(work):
        q = NovikovSeries.monomial(reg, 1, work)
        zero = NovikovSeries.zero(reg, work)
        if equivariant:
            lam = reg.gen("lam")
            rel = [q + lam * lam, zero]
        else:
            rel = [q, zero]
        fd = FrobeniusData.from_relation(reg, "p", rel, [[0, 1], [1, 0]], work, q_degrees=(2,))
        frame = build_frame(fd, "mod-q" if equivariant else "conformal")
        r_ladder(frame, K=2)
        if equivariant:
            lam = reg.gen("lam")
            signs = [(ev.constant_term() / lam).constant_value() for ev in frame.split.eigenvalues["logq1"]]
            cs = c_minus1_from_weights([[lam * (2 * s)] for s in signs])
            parts = elliptic_breakdown(EllipticInput(frame, cs, "equivariant"))
        else:
            parts = elliptic_breakdown(EllipticInput(frame, None, "conformal"))
        dG = parts["total"]
        return min(s.order for s in dG.components.values()), frame, parts

    frame, parts, _ = _escalate(build, Fraction(order))
    return reg, frame, parts


def criterion_1(order=None, perturb=False) -> Check:
    order = 6 if order is None else order
    reg, frame, parts = cp1_frame(order, False)
    dG = parts["total"]
    want = Fraction(-1, 24) + _bump(perturb)
    ok_dG = dG["logq1"].truncate(order).agrees(NovikovSeries.constant(reg, want, order)) and dG["t0"].truncate(order).is_zero()
    # the + branch has eigenvalue +q^(1/2)
    signs = [ev.lowest_term()[1].constant_value() for ev in frame.split.eigenvalues["logq1"]]
    plus, minus = (0, 1) if signs[0] > 0 else (1, 0)
    Rpm = frame.R[0][plus][minus]
    rpm = NovikovSeries.from_dict(reg, {Fraction(-1, 2): Fraction(1, 8)}, Rpm.order)
    ok_R = Rpm.agrees(rpm) and frame.R[0][minus][plus].agrees(-rpm)
    ok_D = all(frame.delta[a].agrees(NovikovSeries.from_dict(reg, {Fraction(1, 2): 2 * s}, frame.delta[a].order))
               for a, s in ((plus, 1), (minus, -1)))
    detail = f"dG_logq={dG['logq1'].truncate(order).text()} R+-={Rpm.text()}"
    return ok_dG and ok_R and ok_D, detail


def criterion_2(order=None, perturb=False) -> Check:
    order = 6 if order is None else order
    reg, frame, parts = cp1_frame(order, True)
    lam = reg.gen("lam")
    o = frame.R[0][0][0].order
    one = NovikovSeries.constant(reg, 1, o)
    q = NovikovSeries.monomial(reg, 1, o)
    p = series_pow(q + lam * lam, Fraction(1, 2))
    pinv = p.inverse()
    want = (pinv.scale(Fraction(-1, 16)) + (pinv * pinv * pinv).scale(lam * lam / 48)
            + one.scale((lam * 24).inverse() + _bump(perturb)))
    plus = 0 if frame.split.eigenvalues["logq1"][0].constant_term() == lam else 1
    Rpp = frame.R[0][plus][plus]
    ok_R = Rpp.agrees(want) and Rpp.constant_term().is_zero() and frame.R[0][1 - plus][1 - plus].agrees(-want)
    dG = parts["total"]
    ok_dG = (dG["logq1"].truncate(order).agrees(NovikovSeries.constant(reg, Fraction(-1, 24), order))
             and dG["t0"].truncate(order).is_zero())
    # Psi in the basis (lam +- p) / 2 lam against z = (1 + q/lam^2)^(1/4)
    z = series_pow(one + q.scale((lam * lam).inverse()), Fraction(1, 4))
    zi = z.inverse()
    half = Fraction(1, 2)
    closed = [[(z + zi).scale(half), (zi - z).scale(half)], [(z - zi).scale(half), (-z - zi).scale(half)]]
    ok_psi = True
    for col, a in enumerate((plus, 1 - plus)):
        A, B = frame.psi[0][a], frame.psi[1][a]
        ours = [A + B.scale(lam), A - B.scale(lam)]
        same = all(x.agrees(closed[i][col]) for i, x in enumerate(ours))
        flipped = all(x.agrees(-closed[i][col]) for i, x in enumerate(ours))
        ok_psi = ok_psi and (same or flipped)
    return ok_R and ok_dG and ok_psi, f"R++={Rpp.truncate(3).text()} dG_logq={dG['logq1'].truncate(order).text()}"


# ---------------------------------------------------------------- singularities


def criterion_3(order=None, perturb=False) -> Check:
    from .singularity import a2_family, a2_frame, numeric_morse_pipeline

    sym = a2_frame()
    u = sym.u[0] - sym.u[1]
    want = -(u * 36).inverse() + _bump(perturb)
    ok_R = sym.R[0] == want and sym.R[1] == -want
    ok_D = (sym.delta[0] ** 3 / (-u / 4)).is_constant()
    ok_dG = all(v.is_zero() for v in sym.dG.values())
    num = numeric_morse_pipeline(a2_family(0.0, 3.0))
    return ok_R and ok_D and ok_dG and num.residual < 1e-9, f"R={sym.R[0]} numeric |dG|={num.residual:.2e}"


def criterion_4(order=None, perturb=False, seed=20240601) -> Check:
    from .errors import IllConditioned
    from .singularity import a3_family, numeric_morse_pipeline

    rng = random.Random(seed)
    worst = 0.0
    done = 0
    while done < 5:
        fam = a3_family(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
        try:
            res = numeric_morse_pipeline(fam)
        except IllConditioned:
            continue
        worst = max(worst, res.residual + (1.0 if perturb else 0.0))
        done += 1
    return worst < 1e-8, f"max |dG| = {worst:.2e}"


# ---------------------------------------------------------------- conifold


def displayed_conifold_term(d: int, sign: int, hbar_order: int):
    """Oracle: the displayed degree-d product at p = sign*lam, expanded in 1/hbar with sympy.

    With x = 1/hbar the product is N(x)/D(x) with D(0) = (d!)^2, so the
    expansion is plain power-series division.  Returns {k: coefficient of hbar^k}.
    """
    import sympy

    lam, x = sympy.symbols("lam x")
    p = sign * lam
    N = sympy.Poly(sympy.Mul(*[(p * x + m) ** 2 for m in range(d)]), x)
    D = sympy.Poly(sympy.Mul(*[((p - lam) * x + m) * ((p + lam) * x + m) for m in range(1, d + 1)]), x)
    n = [N.coeff_monomial(x ** j) for j in range(hbar_order + 1)]
    den = [D.coeff_monomial(x ** j) for j in range(hbar_order + 1)]
    c = []
    for j in range(hbar_order + 1):
        acc = n[j] - sum(den[i] * c[j - i] for i in range(1, j + 1))
        c.append(sympy.expand(acc / den[0]))
    return {-j: cj for j, cj in enumerate(c) if cj != 0}


def criterion_5(order=None, perturb=False) -> Check:
    import sympy

    from .toric import conifold_data, hypergeom_I_concave, relation_from_I

    order = 8 if order is None else order
    data = conifold_data()
    reg = data.reg
    lam_s = sympy.Symbol("lam")
    window = 5
    I = hypergeom_I_concave(data, 6, (-window, 0))
    ok_terms = True
    for d in range(1, 6):
        term = I.terms[(d,)]
        for sign in (1, -1):
            want = displayed_conifold_term(d, sign, window)
            for k in range(-window, 1):
                elem = term.get(k, {})
                a = elem.get((0,), reg.const(0))
                b = elem.get((1,), reg.const(0))
                val = a + b * reg.gen("lam") * sign
                got = sympy.sympify(str(val).replace("^", "**"), locals={"lam": lam_s})
                if sympy.simplify(got - want.get(k, 0)) != 0:
                    ok_terms = False
    rel = relation_from_I(data, order, [0, 1])
    lam = reg.gen("lam")
    geo = NovikovSeries.geometric(reg, order).scale(lam * lam + _bump(perturb))
    ok_rel = rel[0].truncate(order).agrees(geo) and rel[1].truncate(order).is_zero()
    return ok_terms and ok_rel, f"p^2 = {rel[0].truncate(4).text()}"


def criterion_6(order=None, perturb=False) -> Check:
    from .toric import conifold_pipeline

    order = 8 if order is None else order
    out = conifold_pipeline(order)
    reg = out["frobenius"].reg
    terms = {0: Fraction(1, 8) + _bump(perturb)}
    terms.update({d: Fraction(1, 12) for d in range(1, order)})
    want = NovikovSeries.from_dict(reg, terms, order)
    ok = out["dG"]["logq1"].agrees(want) and out["dG"]["t0"].is_zero() and out["covers_match"]
    return ok, f"dG_logq={out['dG']['logq1'].truncate(4).text()} covers={out['covers'].truncate(4).text()}"


def criterion_7(order=None, perturb=False) -> Check:
    from .toric import genus0_cover_potential, yukawa_series

    order = 8 if order is None else order
    empty = Registry(())
    Y = yukawa_series(order)
    F0, F0prime = genus0_cover_potential(order)
    # (q d/dq)^3 F0 from the p = 0 residue against the p = infinity residue of p^3
    d3 = F0.qderiv().qderiv().qderiv()
    ok = d3.agrees(Y) and F0.qderiv().agrees(F0prime)
    # covers of a degree-D curve: (Q d/dQ)^3 F0(Q^D) = D^3 Q^D / (1 - Q^D)
    for D in (1, 2, 3):
        FD = NovikovSeries.from_dict(empty, {D * k: c for (k,), c in F0.items()}, order)
        lhs = FD.qderiv().qderiv().qderiv()
        rhs = NovikovSeries.from_dict(empty, {D * k: D ** 3 for k in range(1, order) if D * k < order}, order)
        ok = ok and lhs.agrees(rhs)
    want = NovikovSeries.from_dict(empty, {d: 1 + _bump(perturb) for d in range(1, order)}, order)
    ok = ok and Y.agrees(want)
    return ok, f"Y={Y.truncate(5).text()}"


# ---------------------------------------------------------------- ladder


def criterion_8(order=None, perturb=False) -> Check:
    from .frame import assemble_S_and_verify, diagonal_forms, dr_from_hessians, symmetry_defect

    order = 6 if order is None else order
    ok = True
    notes = []
    for eq in (False, True):
        _, frame, _ = cp1_frame(order, eq)
        rep = assemble_S_and_verify(frame, K=1)
        sym = symmetry_defect(frame) is None
        pred = dr_from_hessians(frame.delta, frame.du)
        if perturb:
            pred = [p.scale(1 + _bump(True)) for p in pred]
        diag = all(p.agrees(q) for p, q in zip(pred, diagonal_forms(frame, 0)))
        ok = ok and bool(rep) and sym and diag
        notes.append(f"{'equivariant' if eq else 'plain'}: residual={'ok' if rep else rep.level} sym={sym} dR={diag}")
    return ok, "; ".join(notes)


# ---------------------------------------------------------------- string flow


def criterion_9(order=None, perturb=False, seed=11) -> Check:
    from .dmflow import dm_potentials, exp_product_jet, random_descendant

    order = 6 if order is None else order
    rng = random.Random(seed)
    reg = Registry(())
    for n in range(20):
        T = random_descendant(rng, reg, order, length=rng.randint(1, 4))
        P = dm_potentials(T, order)
        mu_ok = P.mu.agrees(P.u.scale(Fraction(1, 24) + _bump(perturb)))
        nu_ok = P.nu.agrees(series_log(P.delta).scale(Fraction(1, 24)))
        v_ok = P.v.numerator().agrees(exp_product_jet(P.u, 3, 3))
        if not (mu_ok and nu_ok and v_ok):
            return False, f"sample {n}: mu={mu_ok} nu={nu_ok} v={v_ok}"
    return True, "20 samples"


# ---------------------------------------------------------------- oracles


def gaussian_moment_R(A, B, C, a0, a1, a2):
    """hbar^1 coefficient of the normalized Gaussian integral, by expanding the
    non-Gaussian part of the exponent and integrating monomials against
    exp(A t^2 / 2 hbar), <t^2k> = (-hbar/A)^k (2k-1)!!."""
    A, B, C, a0, a1, a2 = (Fraction(v) if isinstance(v, int) else v for v in (A, B, C, a0, a1, a2))
    # integrand polynomial: {(power of t, power of hbar): coefficient}
    amp = {(0, 0): a0, (1, 0): a1, (2, 0): a2 / 2}
    pert = {(3, -1): B / 6, (4, -1): C / 24}
    expo = {(0, 0): 1}
    term = {(0, 0): 1}
    for n in range(1, 4):
        nxt = {}
        for (t1, h1), c1 in term.items():
            for (t2, h2), c2 in pert.items():
                key = (t1 + t2, h1 + h2)
                nxt[key] = nxt.get(key, 0) + c1 * c2
        term = nxt
        for k, c in term.items():
            expo[k] = expo.get(k, 0) + c / factorial(n)
    total = {}
    for (t1, h1), c1 in amp.items():
        for (t2, h2), c2 in expo.items():
            t, h = t1 + t2, h1 + h2
            if t % 2:
                continue
            k = t // 2
            dfact = 1
            for j in range(1, 2 * k, 2):
                dfact *= j
            val = c1 * c2 * dfact * (-1) ** k / A ** k if k else c1 * c2
            total[h + k] = total.get(h + k, 0) + val
    return total.get(1, 0) / total[0]


def criterion_10(order=None, perturb=False, seed=5) -> Check:
    from .frobenius import FrobeniusData, wdvv_check
    from .singularity import Jet4, stationary_phase_R

    rng = random.Random(seed)

    def rnd(nonzero=False):
        while True:
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            if x or not nonzero:
                return x

    for _ in range(100):
        A, B, C = rnd(True), rnd(), rnd()
        a0, a1, a2 = rnd(True), rnd(), rnd()
        got = stationary_phase_R(Jet4(0, A, B, C, a0, a1, a2))
        if got != gaussian_moment_R(A, B, C, a0, a1, a2) + _bump(perturb):
            return False, f"jet A={A} B={B} C={C} a=({a0},{a1},{a2})"
    reg = Registry(())
    o = 6
    q = NovikovSeries.monomial(reg, 1, o)
    z = NovikovSeries.zero(reg, o)
    cp1 = FrobeniusData.from_relation(reg, "p", [q, z], [[0, 1], [1, 0]], o, q_degrees=(2,))
    cp2 = FrobeniusData.from_relation(reg, "p", [q, z, z], [[0, 0, 1], [0, 1, 0], [1, 0, 0]], o, q_degrees=(3,))
    if not (wdvv_check(cp1) and wdvv_check(cp2)):
        return False, "WDVV fails on unperturbed data"
    bad = perturbed_cp2(o)
    res = wdvv_check(bad)
    if res.passed:
        return False, "perturbed tensor passes WDVV"
    ok_w = witness_is_first_failure(bad, res.witness["triple"])
    return ok_w, f"witness {res.witness['triple']}"


def perturbed_cp2(order):
    """CP2 algebra with p o p^2 nudged by q^2 * p, which breaks associativity."""
    from .frobenius import FrobeniusData

    reg = Registry(())
    q = NovikovSeries.monomial(reg, 1, order)
    z = NovikovSeries.zero(reg, order)
    fd = FrobeniusData.from_relation(reg, "p", [q, z, z], [[0, 0, 1], [0, 1, 0], [1, 0, 0]], order, q_degrees=(3,))
    bumped = list(fd.products[(1, 2)])
    bumped[1] = bumped[1] + NovikovSeries.monomial(reg, 2, order)
    fd.products[(1, 2)] = bumped
    fd.products[(2, 1)] = bumped
    return fd


def witness_is_first_failure(fd, triple) -> bool:
    """Recompute associativity triple by triple; the witness must be the first failure."""
    from .frobenius import quantum_product

    n = fd.rank
    for i in range(n):
        for j in range(n):
            for k in range(n):
                ei, ej, ek = fd.basis_vector(i), fd.basis_vector(j), fd.basis_vector(k)
                lhs = quantum_product(fd, quantum_product(fd, ei, ej), ek)
                rhs = quantum_product(fd, ei, quantum_product(fd, ej, ek))
                if not all(a.agrees(b) for a, b in zip(lhs, rhs)):
                    return (fd.basis[i], fd.basis[j], fd.basis[k]) == tuple(triple)
    return False


CRITERIA: Dict[int, Tuple[str, Callable]] = {
    1: ("CP1 elliptic form", criterion_1),
    2: ("equivariant CP1", criterion_2),
    3: ("A2 exact and numeric", criterion_3),
    4: ("A3 numeric", criterion_4),
    5: ("conifold genus 0", criterion_5),
    6: ("conifold genus 1", criterion_6),
    7: ("Yukawa identity", criterion_7),
    8: ("R-matrix ladder", criterion_8),
    9: ("string-flow potentials", criterion_9),
    10: ("oracle agreement", criterion_10),
}


def run_suite(order: Optional[int] = None, perturb=()) -> List[dict]:
    out = []
    for n, (title, fn) in CRITERIA.items():
        try:
            ok, detail = fn(order, n in perturb)
        except Exception as exc:  # a crash is a failure of that criterion, not of the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append({"criterion": n, "title": title, "passed": bool(ok), "detail": detail})
    return out
