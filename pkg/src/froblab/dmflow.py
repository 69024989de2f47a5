"""String flow on descendant series and the vertex potentials it transports.

A descendant series T(c) = t0 + t1 c + t2 c^2 + ... flows along
L = d/dt0 - sum_n t_{n+1} d/dt_n, i.e. t_k(tau) = sum_{n>=k} t_n (-tau)^(n-k)/(n-k)!
for k >= 1 and t_0(tau) = tau + sum_n t_n (-tau)^n / n!.  Every potential f
with L f = a f + b is constant along characteristics up to that inhomogeneity,
so it is determined by its value on the slice t0 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Tuple

from .errors import NoConvergence
from .series import HJet, NovikovSeries, hjet_exp_over_hbar, series_log


@dataclass
class DescendantSeries:
    coeffs: List[NovikovSeries]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a descendant series needs at least t0")
        self.coeffs = list(self.coeffs)

    @property
    def reg(self):
        return self.coeffs[0].reg

    @property
    def order(self):
        return min(c.order for c in self.coeffs)

    @property
    def weights(self):
        return self.coeffs[0].weights

    def __getitem__(self, n: int) -> NovikovSeries:
        if n < len(self.coeffs):
            return self.coeffs[n]
        return NovikovSeries.zero(self.reg, self.order, self.weights)

    def check_support(self):
        for n, c in enumerate(self.coeffs[1:], start=1):
            if not c.constant_term().is_zero() or c.has_negative_exponents():
                raise NoConvergence(f"t{n} does not vanish at q = 0; the flow is not q-adically convergent")

    def text(self) -> str:
        return "; ".join(f"t{n}: {c.text()}" for n, c in enumerate(self.coeffs))


def _flowed(T: DescendantSeries, tau: NovikovSeries, k: int) -> NovikovSeries:
    """t_k(tau)."""
    acc = tau if k == 0 else tau * 0
    power = NovikovSeries.constant(T.reg, 1, T.order, T.weights)
    neg = -tau
    for n in range(k, len(T.coeffs)):
        j = n - k
        if j:
            power = power * neg
        acc = acc + T[n] * power.scale(Fraction(1, factorial(j)))
    return acc


def string_flow(T: DescendantSeries, order=None) -> Tuple[NovikovSeries, DescendantSeries]:
    """Flow time tau* with t0(tau*) = 0, by Newton iteration in the q-adic topology."""
    T.check_support()
    order = T.order if order is None else Fraction(order)
    T = DescendantSeries([c.truncate(order) for c in T.coeffs])
    tau = -T[0]
    for _ in range(2 * int(order) + 8):
        F = _flowed(T, tau, 0)
        if F.is_zero():
            break
        # dF/dtau = 1 - t_1(tau)
        dF = 1 - _flowed(T, tau, 1)
        tau = tau - F * dF.inverse()
    else:
        raise NoConvergence("Newton iteration for the flow time did not settle")
    flowed = DescendantSeries([_flowed(T, tau, k) if k else tau * 0 for k in range(len(T.coeffs))])
    return tau, flowed


@dataclass
class TwoJet:
    """Coefficients of x^-a y^-b for 0 <= a <= wx, 0 <= b <= wy, times a formal 1/(x + y)."""

    coeffs: Dict[Tuple[int, int], NovikovSeries]
    wx: int
    wy: int
    over_x_plus_y: bool = True

    def numerator(self) -> "TwoJet":
        """(x + y) times this jet."""
        return TwoJet(dict(self.coeffs), self.wx, self.wy, False)

    def agrees(self, o: "TwoJet") -> bool:
        if self.over_x_plus_y != o.over_x_plus_y:
            return False
        wx, wy = min(self.wx, o.wx), min(self.wy, o.wy)
        for a in range(wx + 1):
            for b in range(wy + 1):
                x, y = self.coeffs.get((a, b)), o.coeffs.get((a, b))
                if x is None and y is None:
                    continue
                if x is None:
                    x = y * 0
                if y is None:
                    y = x * 0
                if not x.agrees(y):
                    return False
        return True


def _transport(initial: NovikovSeries, u: NovikovSeries, source=Fraction(0)) -> NovikovSeries:
    """Solution of L f = source with f = initial on t0 = 0 at flow distance u."""
    return initial + u.scale(source)


def _transport_exp2(u: NovikovSeries, wx: int, wy: int) -> TwoJet:
    """Solution of L f = f/x + f/y with f = 1/(x+y) on t0 = 0, expanded in 1/x, 1/y."""
    # exp(u (1/x + 1/y)) = sum_m u^m (1/x + 1/y)^m / m!
    coeffs: Dict[Tuple[int, int], NovikovSeries] = {}
    power = NovikovSeries.constant(u.reg, 1, u.order, u.weights)
    for m in range(wx + wy + 1):
        if m:
            power = power * u
        for a in range(m + 1):
            b = m - a
            if a > wx or b > wy:
                continue
            coeffs[(a, b)] = power.scale(Fraction(1, factorial(a) * factorial(b)))
    return TwoJet(coeffs, wx, wy, True)


@dataclass
class Potentials:
    tau: NovikovSeries
    flowed: DescendantSeries
    u: NovikovSeries
    delta: NovikovSeries
    mu: NovikovSeries
    nu: NovikovSeries
    s: HJet
    v: TwoJet


def dm_potentials(T: DescendantSeries, order=None, hbar_window: int = 4,
                  xy_window: Tuple[int, int] = (3, 3)) -> Potentials:
    tau, flowed = string_flow(T, order)
    u = -tau
    one = NovikovSeries.constant(u.reg, 1, u.order, u.weights)
    t1 = flowed[1]
    # values on the slice t0 = 0
    delta0 = (one - t1).inverse()
    nu0 = series_log(one - t1).scale(Fraction(-1, 24))
    delta = _transport(delta0, u)
    mu = _transport(u * 0, u, Fraction(1, 24))
    nu = _transport(nu0, u)
    s = hjet_exp_over_hbar(u, -hbar_window)
    v = _transport_exp2(u, *xy_window)
    return Potentials(tau, flowed, u, delta, mu, nu, s, v)


def exp_product_jet(u: NovikovSeries, wx: int, wy: int) -> TwoJet:
    """exp(u/x) exp(u/y) as a product of two one-variable jets."""
    ex = hjet_exp_over_hbar(u, -wx)
    ey = hjet_exp_over_hbar(u, -wy)
    coeffs = {}
    for a in range(wx + 1):
        for b in range(wy + 1):
            coeffs[(a, b)] = ex[-a] * ey[-b]
    return TwoJet(coeffs, wx, wy, False)


def random_descendant(rng, reg, order, length=3, nvars=1) -> DescendantSeries:
    """Random T with small rational coefficients satisfying the support condition."""
    weights = (1,) * nvars
    coeffs = []
    for n in range(length):
        terms = {}
        for _ in range(3):
            e = tuple(rng.randint(0, int(order) - 1) for _ in range(nvars))
            if sum(e) == 0 or sum(e) >= order:
                continue
            terms[e] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        coeffs.append(NovikovSeries.from_dict(reg, terms, order, weights))
    return DescendantSeries(coeffs)
