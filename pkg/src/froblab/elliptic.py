"""Elliptic 1-form assembled from a canonical frame."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .exact import RatFunc
from .frame import CanonicalFrame
from .series import NovikovSeries, OneForm, dlog


@dataclass
class EllipticInput:
    frame: CanonicalFrame
    c_minus1: Optional[Sequence[RatFunc]] = None
    mode: str = "conformal"

    def __post_init__(self):
        if self.mode not in ("conformal", "equivariant"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "equivariant":
            if self.c_minus1 is None or len(self.c_minus1) != self.frame.rank:
                raise ValueError("equivariant mode needs one c_-1 constant per branch")
            if self.frame.rule != "mod-q":
                raise ValueError("equivariant mode needs a mod-q normalized frame")


def c_minus1_from_weights(tangent_weights: Sequence[Sequence[RatFunc]]) -> List[RatFunc]:
    """sum of inverse tangent weights at each fixed point."""
    out = []
    for ws in tangent_weights:
        acc = None
        for w in ws:
            t = w.inverse()
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def _zero_form(frame: CanonicalFrame) -> OneForm:
    ref = frame.delta[0]
    return OneForm({n: NovikovSeries.zero(ref.reg, ref.order, ref.weights) for n in frame.coords})


def dlog_form(s: NovikovSeries, coords) -> OneForm:
    return OneForm({n: (s * 0 if n == "t0" else dlog(s, int(n[4:]) - 1)) for n in coords})


def hessian_term(frame: CanonicalFrame) -> OneForm:
    acc = _zero_form(frame)
    for d in frame.delta:
        acc = acc + dlog_form(d, frame.coords)
    return acc.scale(Fraction(1, 48))


def r_term(frame: CanonicalFrame, shifts: Optional[Sequence] = None) -> OneForm:
    if not frame.R:
        raise ValueError("frame has no R-matrix; run r_ladder first")
    acc = _zero_form(frame)
    R = frame.R[0]
    for a in range(frame.rank):
        r = R[a][a]
        if shifts is not None:
            r = r + shifts[a]
        acc = acc + frame.du[a] * r
    return acc.scale(Fraction(1, 2))


def c_term(frame: CanonicalFrame, c_minus1: Sequence[RatFunc]) -> OneForm:
    acc = _zero_form(frame)
    for a, c in enumerate(c_minus1):
        acc = acc + frame.du[a].scale(c)
    return acc.scale(Fraction(-1, 24))


def elliptic_breakdown(inp: EllipticInput) -> Dict[str, OneForm]:
    parts = {"hessian": hessian_term(inp.frame)}
    if inp.mode == "equivariant":
        parts["c_minus1"] = c_term(inp.frame, inp.c_minus1)
    parts["R"] = r_term(inp.frame)
    total = None
    for f in parts.values():
        total = f if total is None else total + f
    parts["total"] = total
    return parts


def elliptic_dg_equivariant(inp: EllipticInput) -> OneForm:
    if inp.mode != "equivariant":
        raise ValueError("input is not in equivariant mode")
    return elliptic_breakdown(inp)["total"]


def elliptic_dg_conformal(frame: CanonicalFrame) -> OneForm:
    return elliptic_breakdown(EllipticInput(frame, None, "conformal"))["total"]


def elliptic_dg_two_term(frame: CanonicalFrame, shifts: Sequence) -> OneForm:
    """sum dlog Delta / 48 + sum (R_aa + shift_a) du_a / 2."""
    return hessian_term(frame) + r_term(frame, shifts)


@dataclass
class ClosednessResult:
    passed: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.passed


def _partial(s: NovikovSeries, name: str) -> NovikovSeries:
    return s * 0 if name == "t0" else s.qderiv(int(name[4:]) - 1)


def closedness_check(form: OneForm) -> ClosednessResult:
    """Mixed partials d_a w_b = d_b w_a for every pair of co-frame directions."""
    names = form.coframe
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if not _partial(form[b], a).agrees(_partial(form[a], b)):
                return ClosednessResult(False, (a, b))
    return ClosednessResult(True)


def homogeneity_check(form: OneForm, q_degrees: Sequence, degree=0) -> Optional[dict]:
    """None if every coefficient of every component is homogeneous of the given degree."""
    for name, s in form.components.items():
        for exps, c in s.items():
            expected = Fraction(degree) - sum(Fraction(e) * Fraction(d) for e, d in zip(exps, q_degrees))
            found = c.homogeneous_degree()
            if found != expected:
                return {"component": name, "exponent": [str(e) for e in exps],
                        "expected": str(expected), "found": None if found is None else str(found)}
    return None
