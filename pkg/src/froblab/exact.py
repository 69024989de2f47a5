"""Exact coefficient field: multivariate polynomials and rational functions over Q.

Every coefficient in froblab lives in a field ``K = Q(x_1, ..., x_n)`` whose
symbols are declared once in a :class:`Registry`.  Polynomials are stored
sparsely as ``{exponent tuple: Fraction}`` maps, ordered lexicographically in
the registry order, with no zero coefficients.  Rational functions are kept
reduced with a monic denominator, so structural equality is field equality.

Examples
--------
>>> K = Registry(("lam", "p"))
>>> lam, p = K.gens()
>>> (p**2 - lam**2) / (p - lam)
lam + p
>>> ratfunc_eval(lam**2 / p, {"lam": 2, "p": 4})
Fraction(1, 1)
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd, isqrt
from typing import Dict, Iterable, Mapping, Tuple

from .errors import (
    NotAPerfectSquare,
    PoleAtPoint,
    RegistryMismatch,
    RootNotInField,
    ZeroDenominator,
)

Monomial = Tuple[int, ...]


class Registry:
    """An ordered list of symbols with optional grading degrees.

    Two registries are compatible when their names agree; the degrees are
    bookkeeping for homogeneity checks only.
    """

    __slots__ = ("names", "degrees", "_index")

    def __init__(self, names: Iterable[str] = (), degrees: Mapping[str, int] | None = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate symbol names in registry")
        degrees = dict(degrees or {})
        self.degrees = tuple(Fraction(degrees.get(n, 1)) for n in self.names)
        self._index = {n: i for i, n in enumerate(self.names)}

    def __eq__(self, other):
        return isinstance(other, Registry) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Registry({self.names!r})"

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"symbol {name!r} not in registry {self.names}") from None

    def zero_exp(self) -> Monomial:
        return (0,) * len(self.names)

    def poly(self, terms: Mapping[Monomial, object] | None = None) -> "MultiPoly":
        return MultiPoly(self, terms or {})

    def const(self, c) -> "RatFunc":
        return RatFunc.from_poly(MultiPoly.constant(self, c))

    def gen(self, name: str) -> "RatFunc":
        return RatFunc.from_poly(MultiPoly.variable(self, name))

    def gens(self):
        return tuple(self.gen(n) for n in self.names)

    def coerce(self, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            _check_reg(self, x.reg)
            return x
        if isinstance(x, MultiPoly):
            _check_reg(self, x.reg)
            return RatFunc.from_poly(x)
        return self.const(x)


def _check_reg(a: Registry, b: Registry):
    if a is not b and a.names != b.names:
        raise RegistryMismatch(f"cannot mix registries {a.names} and {b.names}")


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


# ---------------------------------------------------------------- polynomials


class MultiPoly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("reg", "terms", "_hash")

    def __init__(self, reg: Registry, terms: Mapping[Monomial, object]):
        self.reg = reg
        n = reg.nvars
        clean: Dict[Monomial, Fraction] = {}
        for e, c in terms.items():
            c = _frac(c)
            if c == 0:
                continue
            e = tuple(e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for registry {reg.names}")
            clean[e] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, reg, terms):
        obj = cls.__new__(cls)
        obj.reg = reg
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, reg: Registry, c) -> "MultiPoly":
        return cls(reg, {reg.zero_exp(): c})

    @classmethod
    def variable(cls, reg: Registry, name: str) -> "MultiPoly":
        e = [0] * reg.nvars
        e[reg.index(name)] = 1
        return cls(reg, {tuple(e): 1})

    # -- inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.reg.zero_exp() in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get(self.reg.zero_exp(), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def leading(self) -> Tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms)
        return e, self.terms[e]

    def trailing(self) -> Tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no trailing term")
        e = min(self.terms)
        return e, self.terms[e]

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.reg.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def weighted_degrees(self) -> set:
        w = self.reg.degrees
        return {sum(wi * ei for wi, ei in zip(w, e)) for e in self.terms}

    # -- arithmetic
    def _other(self, o) -> "MultiPoly":
        if isinstance(o, MultiPoly):
            _check_reg(self.reg, o.reg)
            return o
        return MultiPoly.constant(self.reg, o)

    def __add__(self, o):
        if isinstance(o, RatFunc):
            return NotImplemented
        o = self._other(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return MultiPoly._raw(self.reg, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.reg, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        if isinstance(o, RatFunc):
            return NotImplemented
        return self + (-self._other(o))

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        if isinstance(o, RatFunc):
            return NotImplemented
        o = self._other(o)
        if len(o.terms) == 1 and o.reg.zero_exp() in o.terms:
            c = o.terms[o.reg.zero_exp()]
            return MultiPoly._raw(self.reg, {e: v * c for e, v in self.terms.items()})
        t: Dict[Monomial, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
        return MultiPoly._raw(self.reg, t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = MultiPoly.constant(self.reg, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "MultiPoly":
        c = _frac(c)
        if c == 0:
            return MultiPoly._raw(self.reg, {})
        return MultiPoly._raw(self.reg, {e: v * c for e, v in self.terms.items()})

    def mul_monomial(self, e: Monomial, c=1) -> "MultiPoly":
        c = _frac(c)
        return MultiPoly._raw(
            self.reg, {tuple(a + b for a, b in zip(k, e)): v * c for k, v in self.terms.items()}
        )

    def exquo(self, o: "MultiPoly") -> "MultiPoly":
        """Exact division; raises ValueError when ``o`` does not divide ``self``."""
        o = self._other(o)
        if o.is_zero():
            raise ZeroDenominator("division by the zero polynomial")
        if len(o.terms) == 1:
            (e0, c0), = o.terms.items()
            out = {}
            for e, c in self.terms.items():
                d = tuple(a - b for a, b in zip(e, e0))
                if any(x < 0 for x in d):
                    raise ValueError("inexact polynomial division")
                out[d] = c / c0
            return MultiPoly._raw(self.reg, out)
        R = _sympy_ring(self.reg.names)
        q, r = _to_sympy(R, self).div(_to_sympy(R, o))
        if r:
            raise ValueError("inexact polynomial division")
        return _from_sympy(self.reg, q)

    def diff(self, name: str) -> "MultiPoly":
        i = self.reg.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                k = list(e)
                k[i] -= 1
                out[tuple(k)] = c * e[i]
        return MultiPoly._raw(self.reg, out)

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        vals = []
        for n in self.reg.names:
            if n not in values:
                raise KeyError(f"symbol {n!r} not assigned")
            vals.append(_frac(values[n]))
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(vals, e):
                if k:
                    term *= v**k
            total += term
        return total

    def substitute(self, values: Mapping[str, "RatFunc"], target: Registry | None = None) -> "RatFunc":
        """Replace symbols by rational functions over ``target`` (default: own registry).

        Symbols not in ``values`` must exist in the target registry.
        """
        target = target or self.reg
        acc = target.const(0)
        gens = {n: values[n] if n in values else target.gen(n) for n in self.reg.names}
        for e, c in self.terms.items():
            term = target.const(c)
            for n, k in zip(self.reg.names, e):
                if k:
                    term = term * gens[n] ** k
            acc = acc + term
        return acc

    def content(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        if not self.terms:
            return Fraction(0)
        g = 0
        l = 1
        for c in self.terms.values():
            g = igcd(g, c.numerator)
            l = l * c.denominator // igcd(l, c.denominator)
        return Fraction(g, l)

    # -- comparison / display
    def __eq__(self, o):
        if isinstance(o, MultiPoly):
            return self.reg == o.reg and self.terms == o.terms
        if isinstance(o, (int, Fraction)):
            return self.is_constant() and self.constant_value() == o
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.reg.names, frozenset(self.terms.items())))
        return self._hash

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                (n if k == 1 else f"{n}^{k}") for n, k in zip(self.reg.names, e) if k
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    __repr__ = __str__


# ---------------------------------------------------------------- sympy bridge


@lru_cache(maxsize=None)
def _sympy_ring(names):
    from sympy import QQ
    from sympy.polys.rings import ring

    if not names:
        names = ("_c",)
    R = ring(",".join(names), QQ)[0]
    return R


def _to_sympy(R, p: MultiPoly):
    from sympy import QQ

    if p.reg.nvars == 0:
        return R.from_dict({(0,): QQ(c.numerator, c.denominator) for e, c in p.terms.items()})
    return R.from_dict({e: QQ(c.numerator, c.denominator) for e, c in p.terms.items()})


def _from_sympy(reg: Registry, f) -> MultiPoly:
    out = {}
    for e, c in f.terms():
        if reg.nvars == 0:
            e = ()
        out[tuple(e)] = Fraction(int(c.numerator), int(c.denominator))
    return MultiPoly._raw(reg, {e: c for e, c in out.items() if c})


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic-normalised gcd (leading coefficient 1; zero if both are zero)."""
    _check_reg(a.reg, b.reg)
    if a.is_zero():
        return _monic(b) if not b.is_zero() else b
    if b.is_zero():
        return _monic(a)
    if a.is_constant() or b.is_constant():
        return MultiPoly.constant(a.reg, 1)
    for m, other in ((a, b), (b, a)):
        if m.is_monomial():
            (e0, _), = m.terms.items()
            low = list(e0)
            for e in other.terms:
                low = [min(x, y) for x, y in zip(low, e)]
            return MultiPoly._raw(a.reg, {tuple(low): Fraction(1)})
    R = _sympy_ring(a.reg.names)
    return _monic(_from_sympy(a.reg, _to_sympy(R, a).gcd(_to_sympy(R, b))))


def _monic(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    _, c = p.leading()
    return p.scale(1 / c)


def _rational_root(c: Fraction, n: int) -> Fraction:
    if c < 0:
        if n % 2 == 0:
            raise NotAPerfectSquare(f"{c} has no real {n}-th root")
        return -_rational_root(-c, n)

    def iroot(m):
        if m < 2:
            return m
        r = int(round(m ** (1.0 / n))) if m < 2**1000 else _int_root_newton(m, n)
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**n == m:
                return cand
        r = _int_root_newton(m, n)
        if r**n == m:
            return r
        raise NotAPerfectSquare(f"{c} is not a perfect {n}-th power")

    return Fraction(iroot(c.numerator), iroot(c.denominator))


def _int_root_newton(m: int, n: int) -> int:
    if n == 2:
        return isqrt(m)
    x = 1 << ((m.bit_length() + n - 1) // n)
    while True:
        y = ((n - 1) * x + m // x ** (n - 1)) // n
        if y >= x:
            return x
        x = y


def poly_root(p: MultiPoly, n: int) -> MultiPoly:
    """Polynomial n-th root with positive leading coefficient (odd n: real branch).

    Raises :class:`NotAPerfectSquare` when no polynomial root exists.
    """
    if n < 1:
        raise ValueError("root index must be positive")
    if n == 1 or p.is_zero():
        return p
    e_lead, c_lead = p.leading()
    if any(x % n for x in e_lead):
        raise NotAPerfectSquare(f"leading monomial of {p} is not an {n}-th power")
    s_lead_e = tuple(x // n for x in e_lead)
    s = MultiPoly._raw(p.reg, {s_lead_e: _rational_root(c_lead, n)})
    e_trail, c_trail = p.trailing()
    if any(x % n for x in e_trail):
        raise NotAPerfectSquare(f"trailing monomial of {p} is not an {n}-th power")
    floor_e = tuple(x // n for x in e_trail)
    (s_e, s_c), = s.terms.items()
    lead_e = tuple((n - 1) * x for x in s_e)
    dlead = n * s_c ** (n - 1)
    while True:
        r = p - s**n
        if r.is_zero():
            return s
        e_r, c_r = r.leading()
        step = tuple(a - b for a, b in zip(e_r, lead_e))
        if any(x < 0 for x in step) or step < floor_e:
            raise NotAPerfectSquare(f"{p} is not a perfect {n}-th power")
        s = s + MultiPoly._raw(p.reg, {step: c_r / dlead})


def poly_sqrt(p: MultiPoly) -> MultiPoly:
    """Square root with positive leading coefficient.

    >>> K = Registry(("lam",)); lam = MultiPoly.variable(K, "lam")
    >>> poly_sqrt(lam**2 + 2*lam + 1)
    lam + 1
    """
    return poly_root(p, 2)


# ---------------------------------------------------------------- rational functions


class RatFunc:
    """Reduced quotient of two MultiPolys with a monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MultiPoly, den: MultiPoly, _normalized=False):
        if _normalized:
            self.num, self.den = num, den
        else:
            r = ratfunc_normalize(num, den)
            self.num, self.den = r.num, r.den
        self._hash = None

    @classmethod
    def _make(cls, num, den):
        obj = cls.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RatFunc":
        return cls._make(p, MultiPoly.constant(p.reg, 1))

    @property
    def reg(self) -> Registry:
        return self.num.reg

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num.constant_value() / self.den.constant_value()

    def _coerce(self, o) -> "RatFunc":
        if isinstance(o, RatFunc):
            _check_reg(self.reg, o.reg)
            return o
        if isinstance(o, MultiPoly):
            _check_reg(self.reg, o.reg)
            return RatFunc.from_poly(o)
        if isinstance(o, (int, Fraction)):
            return RatFunc.from_poly(MultiPoly.constant(self.reg, o))
        raise TypeError(f"cannot coerce {type(o).__name__} into RatFunc")

    def __add__(self, o):
        try:
            o = self._coerce(o)
        except RegistryMismatch:
            raise
        except TypeError:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return ratfunc_normalize(self.num + o.num, self.den)
        if self.den.is_constant() and o.den.is_constant():
            return ratfunc_normalize(self.num * o.den + o.num * self.den, self.den * o.den)
        g = poly_gcd(self.den, o.den)
        a = self.den.exquo(g)
        b = o.den.exquo(g)
        return ratfunc_normalize(self.num * b + o.num * a, a * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._make(-self.num, self.den)

    def __sub__(self, o):
        try:
            o = self._coerce(o)
        except RegistryMismatch:
            raise
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        try:
            o = self._coerce(o)
        except RegistryMismatch:
            raise
        except TypeError:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RatFunc.from_poly(MultiPoly._raw(self.reg, {}))
        if self.den.is_constant() and o.den.is_constant():
            return RatFunc._make(self.num * o.num, self.den)  # dens are both 1
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n = self.num.exquo(g1) * o.num.exquo(g2)
        d = self.den.exquo(g2) * o.den.exquo(g1)
        return _fix_sign(n, d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDenominator("inverse of zero")
        return _fix_sign(self.den, self.num)

    def __truediv__(self, o):
        try:
            o = self._coerce(o)
        except RegistryMismatch:
            raise
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("use ratfunc_root for fractional powers")
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc._make(self.num**n, self.den**n)

    def diff(self, name: str) -> "RatFunc":
        n, d = self.num, self.den
        return ratfunc_normalize(n.diff(name) * d - n * d.diff(name), d * d)

    def evaluate(self, values) -> Fraction:
        return ratfunc_eval(self, values)

    def substitute(self, values: Mapping[str, "RatFunc"], target: Registry | None = None) -> "RatFunc":
        return self.num.substitute(values, target) / self.den.substitute(values, target)

    def homogeneous_degree(self):
        """Weighted degree if numerator and denominator are homogeneous, else None."""
        if self.num.is_zero():
            return None
        dn = self.num.weighted_degrees()
        dd = self.den.weighted_degrees()
        if len(dn) != 1 or len(dd) != 1:
            return None
        return next(iter(dn)) - next(iter(dd))

    def equals_cross(self, o: "RatFunc") -> bool:
        """Equality by cross multiplication (independent of the canonical form)."""
        o = self._coerce(o)
        return (self.num * o.den - o.num * self.den).is_zero()

    def __eq__(self, o):
        if isinstance(o, RatFunc):
            return self.reg == o.reg and self.num == o.num and self.den == o.den
        if isinstance(o, (int, Fraction)):
            return self.is_constant() and self.constant_value() == o
        if isinstance(o, MultiPoly):
            return self.den.is_constant() and self.num == o
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        n = str(self.num)
        if len(self.num.terms) > 1 or "/" in n:
            n = f"({n})"
        d = str(self.den)
        if len(self.den.terms) > 1 or "*" in d or "^" in d:
            d = f"({d})"
        return f"{n}/{d}"

    __repr__ = __str__


def _fix_sign(n: MultiPoly, d: MultiPoly) -> RatFunc:
    _, c = d.leading()
    if c != 1:
        n = n.scale(1 / c)
        d = d.scale(1 / c)
    return RatFunc._make(n, d)


def ratfunc_normalize(num: MultiPoly, den: MultiPoly) -> RatFunc:
    """Reduce ``num/den`` to lowest terms with a monic denominator.

    Raises :class:`ZeroDenominator` when ``den`` is zero.
    """
    _check_reg(num.reg, den.reg)
    if den.is_zero():
        raise ZeroDenominator("rational function with zero denominator")
    if num.is_zero():
        return RatFunc._make(num, MultiPoly.constant(num.reg, 1))
    if den.is_constant():
        c = den.constant_value()
        return RatFunc._make(num.scale(1 / c) if c != 1 else num, MultiPoly.constant(num.reg, 1))
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = num.exquo(g)
        den = den.exquo(g)
    return _fix_sign(num, den)


def ratfunc_eval(f: RatFunc, assignment: Mapping[str, object]) -> Fraction:
    """Evaluate at a rational point; raises :class:`PoleAtPoint` on a pole."""
    d = f.den.evaluate(assignment)
    if d == 0:
        raise PoleAtPoint(f"denominator of {f} vanishes at {dict(assignment)}")
    return f.num.evaluate(assignment) / d


def ratfunc_root(f: RatFunc, n: int) -> RatFunc:
    """n-th root in K, or :class:`RootNotInField`."""
    if n == 1:
        return f
    try:
        if f.den.is_constant():
            return RatFunc._make(poly_root(f.num, n), f.den)
        # f = a^n / b^n with b monic up to a constant: root = root(num * den^(n-1)) / den
        top = poly_root(f.num * f.den ** (n - 1), n)
    except NotAPerfectSquare as exc:
        raise RootNotInField(str(exc)) from None
    return ratfunc_normalize(top, f.den)


def ratfunc_sqrt(f: RatFunc) -> RatFunc:
    return ratfunc_root(f, 2)
