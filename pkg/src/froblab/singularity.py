"""One-variable miniversal deformations: critical values, Hessians and
stationary-phase coefficients, exact for the A2 family and numeric in general."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import (DegenerateCritical, IllConditioned, NotAPerfectSquare, OnCaustic,
                     RootFindingFailed)
from .exact import Registry, _rational_root


@dataclass(frozen=True)
class Jet4:
    """Phase u + A t^2/2 + B t^3/6 + C t^4/24 and amplitude a0 + a1 t + a2 t^2/2."""

    u: object
    A: object
    B: object
    C: object
    a0: object = 1
    a1: object = 0
    a2: object = 0


def stationary_phase_R(jet: Jet4):
    """First correction R in a0 sqrt(2 pi hbar / -A) e^{u/hbar} (1 + hbar R + ...).

    Exact for Fraction / RatFunc input, floating for float / complex input.
    """
    A, B, C, a0, a1, a2 = jet.A, jet.B, jet.C, jet.a0, jet.a1, jet.a2
    if A == 0:
        raise DegenerateCritical("second derivative of the phase vanishes")
    if a0 == 0:
        raise DegenerateCritical("amplitude vanishes at the critical point")
    A2 = A * A
    return (-a2 / (2 * a0 * A) + a1 * B / (2 * a0 * A2)
            + C / (8 * A2) - 5 * B * B / (24 * A2 * A))


# ---------------------------------------------------------------- A2, exact


@dataclass
class A2Frame:
    x: list
    u: list
    delta: list
    R: list
    dG: Dict[str, object]
    surd: Optional[Fraction] = None
    reg: Optional[Registry] = None


A2_REGISTRY = Registry(("t0", "x"))


def _a2_symbolic(reg: Registry) -> A2Frame:
    """Frame of z^3 - t1 z + t0 over K = Q(t0, x) with t1 = 3 x^2."""
    t0, x = reg.gen("t0"), reg.gen("x")
    xs = [x, -x]
    us = [t0 - xi * xi * xi * 2 for xi in xs]
    deltas = [xi * 6 for xi in xs]
    Rs = []
    for xi in xs:
        # amplitude d f / d u_a = sum_k phi_k(z) (M^{-1})_{k a}, phi = (1, -z)
        other = -xi
        a1 = (xi - other).inverse()
        jet = Jet4(t0 - xi * xi * xi * 2, xi * 6, reg.const(6), reg.const(0),
                   reg.const(1), a1, reg.const(0))
        Rs.append(stationary_phase_R(jet))
    dG = {}
    for name in ("t0", "x"):
        acc = reg.const(0)
        for d, r, u in zip(deltas, Rs, us):
            acc = acc + d.diff(name) / d / 48 + r * u.diff(name) / 2
        dG[name] = acc
    return A2Frame(xs, us, deltas, Rs, dG, reg=reg)


def a2_frame(t0=None, t1=None) -> A2Frame:
    """Closed-form A2 frame.

    With no arguments the frame is symbolic over Q(t0, x), x^2 = t1/3.  With a
    rational point, t1/3 must be a rational square for exact values; otherwise
    the frame stays symbolic in x and ``surd`` records x^2.
    """
    if t0 is None and t1 is None:
        return _a2_symbolic(A2_REGISTRY)
    t0, t1 = Fraction(t0), Fraction(t1)
    if t1 == 0:
        raise OnCaustic("t1 = 0: the two critical points collide")
    sym = _a2_symbolic(A2_REGISTRY)
    try:
        x0 = _rational_root(t1 / 3, 2)
    except NotAPerfectSquare:
        reg = Registry(("x",))
        sub = {"t0": reg.const(t0)}
        conv = lambda f: f.substitute(sub, reg)  # noqa: E731
        return A2Frame([conv(v) for v in sym.x], [conv(v) for v in sym.u],
                       [conv(v) for v in sym.delta], [conv(v) for v in sym.R],
                       {k: conv(v) for k, v in sym.dG.items()}, surd=t1 / 3, reg=reg)
    point = {"t0": t0, "x": x0}
    ev = lambda f: f.evaluate(point)  # noqa: E731
    return A2Frame([ev(v) for v in sym.x], [ev(v) for v in sym.u], [ev(v) for v in sym.delta],
                   [ev(v) for v in sym.R], {k: ev(v) for k, v in sym.dG.items()})


# ---------------------------------------------------------------- numeric pipeline


def _poly(coeffs: Sequence) -> np.polynomial.Polynomial:
    """Coefficients given from the constant term upward."""
    return np.polynomial.Polynomial(np.asarray(coeffs, dtype=complex))


@dataclass
class MorseFamily:
    """f(z) + sum_k lambda_k phi_k(z); coefficient lists from the constant term up."""

    base: Sequence
    deformations: Sequence[Sequence]
    params: Sequence[float]
    names: Sequence[str] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.names:
            self.names = tuple(f"lambda{k + 1}" for k in range(len(self.deformations)))
        if len(self.params) != len(self.deformations):
            raise ValueError("one parameter value per deformation monomial is required")

    def phase(self) -> np.polynomial.Polynomial:
        f = _poly(self.base)
        for lam, phi in zip(self.params, self.deformations):
            f = f + complex(lam) * _poly(phi)
        return f

    def with_params(self, params) -> "MorseFamily":
        return MorseFamily(self.base, self.deformations, list(params), self.names)


def a2_family(t0: float, t1: float) -> MorseFamily:
    return MorseFamily([0, 0, 0, 1], [[1], [0, -1]], [t0, t1], ("t0", "t1"))


def a3_family(a: float, b: float, c: float = 0.0) -> MorseFamily:
    return MorseFamily([0, 0, 0, 0, 1], [[0, 0, 1], [0, 1], [1]], [a, b, c], ("a", "b", "c"))


@dataclass
class CriticalPoint:
    z: complex
    u: complex
    delta: complex
    R: complex


@dataclass
class MorseReport:
    points: List[CriticalPoint]
    dG: Dict[str, complex]
    residual: float


def critical_points(family: MorseFamily, threshold: float = 1e-6):
    f = family.phase()
    df = f.deriv()
    try:
        zs = df.roots()
    except np.linalg.LinAlgError as exc:
        raise RootFindingFailed(str(exc)) from None
    if len(zs) != len(family.deformations):
        raise RootFindingFailed(
            f"{len(zs)} critical points for {len(family.deformations)} deformation parameters")
    # polish with Newton steps on f'
    d2 = df.deriv()
    polished = []
    for z in zs:
        for _ in range(3):
            h = d2(z)
            if h == 0:
                break
            z = z - df(z) / h
        polished.append(complex(z))
    zs = np.array(polished)
    if not np.all(np.isfinite(zs)):
        raise RootFindingFailed("non-finite critical point")
    hess = d2(zs)
    if np.min(np.abs(hess)) < threshold:
        raise IllConditioned(f"|f''| = {np.min(np.abs(hess)):.3e} at a critical point (near the caustic)")
    return f, zs


def numeric_morse_pipeline(family: MorseFamily, direction=None, threshold: float = 1e-6) -> MorseReport:
    """dG_k = (1/48) sum d_k log Delta_a + (1/2) sum R_a phi_k(z_a) at a floating point."""
    f, zs = critical_points(family, threshold)
    f2, f3, f4 = f.deriv(2), f.deriv(3), f.deriv(4)
    phis = [_poly(p) for p in family.deformations]
    M = np.array([[phi(z) for phi in phis] for z in zs])
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        raise IllConditioned("critical values are not local coordinates here") from None
    if np.linalg.cond(M) > 1 / threshold:
        raise IllConditioned(f"condition number {np.linalg.cond(M):.3e} of the critical-value Jacobian")
    points = []
    for a, z in enumerate(zs):
        # amplitude d f / d u_a and its first two z-derivatives
        amp = [sum(phis[k].deriv(m)(z) * Minv[k, a] for k in range(len(phis))) for m in range(3)]
        jet = Jet4(f(z), f2(z), f3(z), f4(z), amp[0], amp[1], amp[2])
        points.append(CriticalPoint(complex(z), complex(f(z)), complex(f2(z)),
                                    complex(stationary_phase_R(jet))))
    dG = {}
    for k, name in enumerate(family.names):
        acc = 0j
        for p in points:
            phi = phis[k]
            dz = -phi.deriv()(p.z) / p.delta
            ddelta = phi.deriv(2)(p.z) + f3(p.z) * dz
            acc += ddelta / p.delta / 48 + p.R * phi(p.z) / 2
        dG[name] = complex(acc)
    if direction is None:
        residual = max(abs(v) for v in dG.values())
    else:
        key = direction if isinstance(direction, str) else family.names[direction]
        residual = abs(dG[key])
    return MorseReport(points, dG, float(residual))
