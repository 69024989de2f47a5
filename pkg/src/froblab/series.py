"""Truncated Novikov series, hbar-jets, extended functions and 1-forms.

A :class:`NovikovSeries` is a finite sum of monomials ``c * q1^e1 ... qr^er``
with exponents on the lattice ``(1/N) Z^r`` and coefficients in a rational
function field.  It remembers a validity order ``O``: every monomial of
weighted degree below ``O`` is known exactly, nothing above is claimed.

Exponents are non-negative except after an explicit lattice shift
(:meth:`NovikovSeries.shift` or an inverse taken with ``allow_shift=True``).
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Dict, Mapping, Sequence, Tuple

from .errors import NonUnitDivisor, NotExtendable, RegistryMismatch, RootNotInField
from .exact import RatFunc, Registry, ratfunc_root

Exp = Tuple[int, ...]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class NovikovSeries:
    __slots__ = ("reg", "N", "terms", "order", "weights")

    def __init__(self, reg: Registry, terms: Mapping[Exp, RatFunc], order, N: int = 1,
                 weights: Sequence = (1,)):
        self.reg = reg
        self.N = int(N)
        self.weights = tuple(_frac(w) for w in weights)
        self.order = _frac(order)
        r = len(self.weights)
        clean = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != r:
                raise ValueError(f"exponent {e} has wrong length for {r} variables")
            c = reg.coerce(c)
            if c.is_zero():
                continue
            if self._deg(e) < self.order:
                clean[e] = c
        self.terms = clean

    @classmethod
    def _raw(cls, reg, terms, order, N, weights):
        obj = cls.__new__(cls)
        obj.reg, obj.terms, obj.order, obj.N, obj.weights = reg, terms, order, N, weights
        return obj

    # ------------------------------------------------------------ construction
    @classmethod
    def from_dict(cls, reg: Registry, terms: Mapping, order, weights=(1,)) -> "NovikovSeries":
        """Build from ``{exponent tuple (rationals or ints, or a scalar when r=1): coeff}``."""
        r = len(weights)
        norm = {}
        for e, c in terms.items():
            if not isinstance(e, tuple):
                e = (e,)
            norm[tuple(_frac(x) for x in e)] = c
        N = 1
        for e in norm:
            if len(e) != r:
                raise ValueError("exponent length mismatch")
            for x in e:
                N = lcm(N, x.denominator)
        return cls(reg, {tuple(int(x * N) for x in e): c for e, c in norm.items()}, order, N, weights)

    @classmethod
    def constant(cls, reg: Registry, c, order, weights=(1,)) -> "NovikovSeries":
        return cls(reg, {(0,) * len(weights): reg.coerce(c)}, order, 1, weights)

    @classmethod
    def zero(cls, reg: Registry, order, weights=(1,)) -> "NovikovSeries":
        return cls(reg, {}, order, 1, weights)

    @classmethod
    def monomial(cls, reg: Registry, exps, order, coeff=1, weights=(1,)) -> "NovikovSeries":
        if not isinstance(exps, tuple):
            exps = (exps,)
        return cls.from_dict(reg, {exps: coeff}, order, weights)

    @classmethod
    def geometric(cls, reg: Registry, order, weights=(1,)) -> "NovikovSeries":
        """1 + q + q^2 + ... in the first variable."""
        r = len(weights)
        terms = {}
        d = 0
        while d * weights[0] < order:
            terms[(d,) + (0,) * (r - 1)] = reg.const(1)
            d += 1
        return cls(reg, terms, order, 1, weights)

    # ------------------------------------------------------------ basic data
    @property
    def nvars(self) -> int:
        return len(self.weights)

    def _deg(self, e: Exp) -> Fraction:
        return sum((w * x for w, x in zip(self.weights, e)), Fraction(0)) / self.N

    def degree_of(self, exps) -> Fraction:
        return sum((w * _frac(x) for w, x in zip(self.weights, exps)), Fraction(0))

    def exponents(self, e: Exp) -> Tuple[Fraction, ...]:
        return tuple(Fraction(x, self.N) for x in e)

    def items(self):
        """(rational exponent tuple, coefficient) pairs sorted by degree then exponent."""
        keys = sorted(self.terms, key=lambda e: (self._deg(e), e))
        return [(self.exponents(e), self.terms[e]) for e in keys]

    def coeff(self, exps) -> RatFunc:
        if not isinstance(exps, tuple):
            exps = (exps,)
        exps = tuple(_frac(x) for x in exps)
        if self.degree_of(exps) >= self.order:
            raise ValueError(f"coefficient of degree {self.degree_of(exps)} beyond order {self.order}")
        key = []
        for x in exps:
            y = x * self.N
            if y.denominator != 1:
                return self.reg.const(0)
            key.append(int(y))
        return self.terms.get(tuple(key), self.reg.const(0))

    def constant_term(self) -> RatFunc:
        return self.terms.get((0,) * self.nvars, self.reg.const(0))

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Fraction:
        """Lowest weighted degree present (the order itself for a zero series)."""
        if not self.terms:
            return self.order
        return min(self._deg(e) for e in self.terms)

    def has_negative_exponents(self) -> bool:
        return any(x < 0 for e in self.terms for x in e)

    def lowest_term(self) -> Tuple[Exp, RatFunc]:
        """The unique componentwise-minimal monomial (lattice numerators, coeff)."""
        if not self.terms:
            raise NonUnitDivisor("zero series has no lowest term")
        keys = list(self.terms)
        low = tuple(min(e[i] for e in keys) for i in range(self.nvars))
        if low not in self.terms:
            raise NonUnitDivisor("series has no monomial dominating all others from below")
        return low, self.terms[low]

    # ------------------------------------------------------------ lattice handling
    def rebase(self, N: int) -> "NovikovSeries":
        if N == self.N:
            return self
        if N % self.N:
            raise ValueError(f"lattice {N} does not refine {self.N}")
        k = N // self.N
        return NovikovSeries._raw(self.reg, {tuple(x * k for x in e): c for e, c in self.terms.items()},
                                  self.order, N, self.weights)

    def _align(self, o: "NovikovSeries"):
        if not isinstance(o, NovikovSeries):
            o = NovikovSeries.constant(self.reg, o, self.order, self.weights)
        if o.reg != self.reg:
            raise RegistryMismatch("series over different coefficient fields")
        if o.weights != self.weights:
            raise ValueError("series with different variable weights")
        N = lcm(self.N, o.N)
        return self.rebase(N), o.rebase(N)

    def truncate(self, order) -> "NovikovSeries":
        order = min(_frac(order), self.order)
        return NovikovSeries._raw(self.reg, {e: c for e, c in self.terms.items() if self._deg(e) < order},
                                  order, self.N, self.weights)

    def with_order(self, order) -> "NovikovSeries":
        """Declare a (typically exact) series valid to a different order."""
        return NovikovSeries(self.reg, self.terms, order, self.N, self.weights)

    # ------------------------------------------------------------ arithmetic
    def __add__(self, o):
        if isinstance(o, (ExtFunction,)):
            return NotImplemented
        a, b = self._align(o)
        order = min(a.order, b.order)
        t = dict(a.terms)
        for e, c in b.terms.items():
            v = t.get(e)
            v = c if v is None else v + c
            if v.is_zero():
                t.pop(e, None)
            else:
                t[e] = v
        return NovikovSeries._raw(a.reg, {e: c for e, c in t.items() if a._deg(e) < order}, order,
                                  a.N, a.weights)

    __radd__ = __add__

    def __neg__(self):
        return NovikovSeries._raw(self.reg, {e: -c for e, c in self.terms.items()}, self.order,
                                  self.N, self.weights)

    def __sub__(self, o):
        if isinstance(o, ExtFunction):
            return NotImplemented
        return self + (-o if isinstance(o, NovikovSeries) else -self.reg.coerce(o))

    def __rsub__(self, o):
        return (-self) + o

    def scale(self, c) -> "NovikovSeries":
        c = self.reg.coerce(c)
        if c.is_zero():
            return NovikovSeries._raw(self.reg, {}, self.order, self.N, self.weights)
        return NovikovSeries._raw(self.reg, {e: v * c for e, v in self.terms.items()}, self.order,
                                  self.N, self.weights)

    def __mul__(self, o):
        if isinstance(o, ExtFunction):
            return NotImplemented
        if not isinstance(o, NovikovSeries):
            return self.scale(o)
        a, b = self._align(o)
        va, vb = a.valuation(), b.valuation()
        order = min(a.order + vb, b.order + va)
        t: Dict[Exp, RatFunc] = {}
        bt = sorted(b.terms.items(), key=lambda kv: b._deg(kv[0]))
        for e1, c1 in a.terms.items():
            d1 = a._deg(e1)
            for e2, c2 in bt:
                if d1 + a._deg(e2) >= order:
                    break
                e = tuple(x + y for x, y in zip(e1, e2))
                v = t.get(e)
                p = c1 * c2
                v = p if v is None else v + p
                if v.is_zero():
                    t.pop(e, None)
                else:
                    t[e] = v
        return NovikovSeries._raw(a.reg, t, order, a.N, a.weights)

    __rmul__ = __mul__

    def __pow__(self, n):
        if isinstance(n, int):
            if n < 0:
                return self.inverse() ** (-n)
            result = NovikovSeries.constant(self.reg, 1, self.order, self.weights)
            base = self
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        return series_pow(self, _frac(n))

    def shift(self, exps, order_delta=None) -> "NovikovSeries":
        """Multiply by the monomial q^exps (rational, possibly negative exponents)."""
        if not isinstance(exps, tuple):
            exps = (exps,)
        exps = tuple(_frac(x) for x in exps)
        N = self.N
        for x in exps:
            N = lcm(N, x.denominator)
        s = self.rebase(N)
        k = tuple(int(x * N) for x in exps)
        d = self.degree_of(exps)
        return NovikovSeries._raw(self.reg, {tuple(a + b for a, b in zip(e, k)): c for e, c in s.terms.items()},
                                  self.order + d, N, self.weights)

    def inverse(self, allow_shift: bool = False) -> "NovikovSeries":
        """Multiplicative inverse.

        Without ``allow_shift`` the series must have a non-zero constant term and no
        negative exponents.  With it, a lowest monomial ``c q^v`` is factored out and
        the result carries ``q^-v`` (order reduced accordingly).
        """
        if not self.terms:
            raise NonUnitDivisor("division by a zero series")
        low, c = self.lowest_term()
        if any(low):
            if not allow_shift:
                raise NonUnitDivisor("divisor has no constant term; use an explicit lattice shift")
        elif self.has_negative_exponents():
            raise NonUnitDivisor("divisor has negative exponents")
        v = self.exponents(low)
        unit = self.shift(tuple(-x for x in v)).scale(c.inverse())
        # unit = 1 + x with valuation(x) > 0
        x = unit - NovikovSeries.constant(self.reg, 1, unit.order, self.weights)
        inv = _geometric_inverse(x)
        return inv.scale(c.inverse()).shift(tuple(-y for y in v))

    def __truediv__(self, o):
        if isinstance(o, NovikovSeries):
            return self * o.inverse()
        return self.scale(self.reg.coerce(o).inverse())

    def __rtruediv__(self, o):
        return self.inverse() * o

    def divide(self, o: "NovikovSeries", allow_shift: bool = False) -> "NovikovSeries":
        return self * o.inverse(allow_shift=allow_shift)

    # ------------------------------------------------------------ calculus
    def qderiv(self, i: int = 0) -> "NovikovSeries":
        """q_i d/dq_i."""
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                out[e] = c * Fraction(e[i], self.N)
        return NovikovSeries._raw(self.reg, out, self.order, self.N, self.weights)

    def map_coeffs(self, f) -> "NovikovSeries":
        out = {}
        for e, c in self.terms.items():
            v = f(c)
            if not v.is_zero():
                out[e] = v
        reg = next(iter(out.values())).reg if out else self.reg
        return NovikovSeries._raw(reg, out, self.order, self.N, self.weights)

    # ------------------------------------------------------------ comparison / display
    def agrees(self, o, order=None) -> bool:
        """True when both series coincide below ``order`` (default: common validity order)."""
        if not isinstance(o, NovikovSeries):
            o = NovikovSeries.constant(self.reg, o, self.order, self.weights)
        a, b = self._align(o)
        lim = min(a.order, b.order) if order is None else _frac(order)
        if lim > min(a.order, b.order):
            return False
        keys = {e for e in a.terms if a._deg(e) < lim} | {e for e in b.terms if b._deg(e) < lim}
        zero = self.reg.const(0)
        return all(a.terms.get(e, zero) == b.terms.get(e, zero) for e in keys)

    def __eq__(self, o):
        if isinstance(o, NovikovSeries) or isinstance(o, (int, Fraction, RatFunc)):
            try:
                return self.agrees(o)
            except (RegistryMismatch, ValueError):
                return False
        return NotImplemented

    __hash__ = None

    def text(self) -> str:
        return series_text(self)

    def __str__(self):
        return self.text()

    __repr__ = __str__


def _geometric_inverse(x: NovikovSeries) -> NovikovSeries:
    """1/(1+x) for x of positive valuation."""
    if x.valuation() <= 0 and not x.is_zero():
        raise NonUnitDivisor("expected a series of positive valuation")
    one = NovikovSeries.constant(x.reg, 1, x.order, x.weights)
    result = one
    power = one
    sign = 1
    while True:
        power = (power * x).truncate(x.order)
        if power.is_zero():
            break
        sign = -sign
        result = result + power.scale(sign)
    return result


def _power_series(x: NovikovSeries, coeffs) -> NovikovSeries:
    """sum_k coeffs(k) x^k for x of positive valuation; coeffs returns Fraction/RatFunc."""
    if not x.is_zero() and (x.valuation() <= 0 or x.has_negative_exponents()):
        raise NonUnitDivisor("power series argument must have positive valuation")
    result = NovikovSeries.constant(x.reg, coeffs(0), x.order, x.weights)
    power = NovikovSeries.constant(x.reg, 1, x.order, x.weights)
    k = 0
    while True:
        k += 1
        power = (power * x).truncate(x.order)
        if power.is_zero():
            return result
        result = result + power.scale(coeffs(k))


def series_exp(a: NovikovSeries) -> NovikovSeries:
    c = a.constant_term()
    if not c.is_zero():
        raise RootNotInField("exp of a non-zero constant term is not in the coefficient field")
    fact = [Fraction(1)]

    def coeff(k):
        while len(fact) <= k:
            fact.append(fact[-1] / len(fact))
        return fact[k]

    return _power_series(a, coeff)


def series_log(a: NovikovSeries) -> NovikovSeries:
    c = a.constant_term()
    if c != 1:
        raise RootNotInField(f"log needs constant term 1, got {c}")
    x = a - NovikovSeries.constant(a.reg, 1, a.order, a.weights)
    return _power_series(x, lambda k: Fraction(0) if k == 0 else Fraction((-1) ** (k + 1), k))


def binomial(rho: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out = out * (rho - j) / (j + 1)
    return out


def series_pow(a: NovikovSeries, rho) -> NovikovSeries:
    """a^rho for rational rho; the lattice is enlarged when the exponent demands it."""
    rho = _frac(rho)
    if rho.denominator == 1:
        return a ** int(rho)
    low, c = a.lowest_term()
    v = a.exponents(low)
    unit = a.shift(tuple(-x for x in v)).scale(c.inverse())
    x = unit - NovikovSeries.constant(a.reg, 1, unit.order, a.weights)
    body = _power_series(x, lambda k: binomial(rho, k))
    lead = ratfunc_root(c, rho.denominator) ** rho.numerator
    return body.scale(lead).shift(tuple(rho * y for y in v))


def series_sqrt(a: NovikovSeries) -> NovikovSeries:
    return series_pow(a, Fraction(1, 2))


def series_transcendental(a: NovikovSeries, op: str, rho=None) -> NovikovSeries:
    if op == "exp":
        return series_exp(a)
    if op == "log":
        return series_log(a)
    if op == "pow":
        return series_pow(a, rho)
    raise ValueError(f"unknown transcendental operation {op!r}")


def series_arith(a: NovikovSeries, b: NovikovSeries, op: str) -> NovikovSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown arithmetic operation {op!r}")


def dlog(a: NovikovSeries, i: int = 0) -> NovikovSeries:
    """(q_i d/dq_i) log a, with the monomial prefactor of ``a`` contributing its exponent."""
    low, c = a.lowest_term()
    v = a.exponents(low)
    unit = a.shift(tuple(-x for x in v)).scale(c.inverse())
    return (unit.qderiv(i) / unit) + NovikovSeries.constant(a.reg, v[i], unit.order, a.weights)


# ---------------------------------------------------------------- extended functions

def coframe_names(nvars: int) -> Tuple[str, ...]:
    return ("t0",) + tuple(f"logq{i + 1}" for i in range(nvars))


class ExtFunction:
    """Linear combination of t0 and log q_i plus a Novikov series."""

    __slots__ = ("linear", "series")

    def __init__(self, linear: Mapping[str, object], series: NovikovSeries):
        names = coframe_names(series.nvars)
        lin = {}
        for k, v in linear.items():
            if k not in names:
                raise NotExtendable(f"linear symbol {k!r} is not t0 or a log q")
            v = series.reg.coerce(v)
            if not v.is_zero():
                lin[k] = v
        self.linear = lin
        self.series = series

    @property
    def reg(self):
        return self.series.reg

    def coefficient(self, name: str) -> RatFunc:
        return self.linear.get(name, self.reg.const(0))

    def __add__(self, o):
        if isinstance(o, ExtFunction):
            lin = dict(self.linear)
            for k, v in o.linear.items():
                lin[k] = lin.get(k, self.reg.const(0)) + v
            return ExtFunction(lin, self.series + o.series)
        return ExtFunction(self.linear, self.series + o)

    __radd__ = __add__

    def __neg__(self):
        return ExtFunction({k: -v for k, v in self.linear.items()}, -self.series)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, NovikovSeries):
            if self.linear:
                if o.is_zero():
                    return ExtFunction({}, self.series * o)
                if any(any(e) for e in o.terms):
                    raise NotExtendable("product of a log/t0 term with a non-constant series")
                c = o.constant_term()
                return ExtFunction({k: v * c for k, v in self.linear.items()}, self.series * o)
            return ExtFunction({}, self.series * o)
        if isinstance(o, ExtFunction):
            raise NotExtendable("product of two extended functions")
        c = self.reg.coerce(o)
        return ExtFunction({k: v * c for k, v in self.linear.items()}, self.series.scale(c))

    __rmul__ = __mul__

    def partial(self, name: str) -> NovikovSeries:
        s = self.series
        base = NovikovSeries.constant(self.reg, self.coefficient(name), s.order, s.weights)
        if name == "t0":
            return base
        i = int(name[4:]) - 1
        return base + s.qderiv(i)

    def d(self) -> "OneForm":
        names = coframe_names(self.series.nvars)
        return OneForm({n: self.partial(n) for n in names})

    def agrees(self, o: "ExtFunction") -> bool:
        names = set(self.linear) | set(o.linear)
        return all(self.coefficient(n) == o.coefficient(n) for n in names) and self.series.agrees(o.series)

    def __eq__(self, o):
        if isinstance(o, ExtFunction):
            return self.agrees(o)
        return NotImplemented

    __hash__ = None

    def text(self) -> str:
        parts = []
        for n in coframe_names(self.series.nvars):
            if n in self.linear:
                label = n if n == "t0" else f"log(q{n[4:]})"
                parts.append(f"({self.linear[n]}) * {label}")
        parts.append(self.series.text())
        return " + ".join(parts)

    __str__ = text
    __repr__ = text


def integrate_dlog(a: NovikovSeries, i: int = 0):
    """Antiderivative in log q_i.

    Terms independent of q_i other than the constant cannot be integrated inside
    the extended-function shape; a constant term becomes a log q_i coefficient.
    """
    out = {}
    const = None
    for e, c in a.terms.items():
        if e[i] == 0:
            if any(e):
                raise NotExtendable("term independent of the integration variable")
            const = c
            continue
        out[e] = c / Fraction(e[i], a.N)
    s = NovikovSeries._raw(a.reg, out, a.order, a.N, a.weights)
    if const is None:
        return s
    return ExtFunction({f"logq{i + 1}": const}, s)


def series_calculus(a, op: str, i: int = 0):
    if op == "dlog":
        if isinstance(a, ExtFunction):
            return a.partial(f"logq{i + 1}")
        return a.qderiv(i)
    if op == "integrate":
        if isinstance(a, ExtFunction):
            base = integrate_dlog(a.series, i)
            lin = dict(a.linear)
            if lin:
                raise NotExtendable("integrating log/t0 terms leaves the extended-function shape")
            return base
        return integrate_dlog(a, i)
    raise ValueError(f"unknown calculus operation {op!r}")


# ---------------------------------------------------------------- one-forms


class OneForm:
    """Components over a co-frame {dt0, dlog q_1, ...} (or a du co-frame)."""

    __slots__ = ("components",)

    def __init__(self, components: Mapping[str, NovikovSeries]):
        self.components = dict(components)

    @property
    def coframe(self):
        return tuple(self.components)

    def __getitem__(self, name):
        return self.components[name]

    def _check(self, o):
        if set(o.components) != set(self.components):
            raise ValueError("one-forms over different co-frames")

    def __add__(self, o):
        if isinstance(o, int) and o == 0:
            return self
        self._check(o)
        return OneForm({k: v + o.components[k] for k, v in self.components.items()})

    __radd__ = __add__

    def __neg__(self):
        return OneForm({k: -v for k, v in self.components.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, f):
        return OneForm({k: v * f for k, v in self.components.items()})

    __rmul__ = __mul__

    def scale(self, c):
        return OneForm({k: v.scale(c) for k, v in self.components.items()})

    def agrees(self, o) -> bool:
        self._check(o)
        return all(v.agrees(o.components[k]) for k, v in self.components.items())

    def __eq__(self, o):
        if isinstance(o, OneForm):
            return self.agrees(o)
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.components.values())

    def text(self) -> str:
        return " + ".join(f"[{v.text()}] d{k}" for k, v in self.components.items())

    __str__ = text
    __repr__ = text


def partial_along(f: NovikovSeries, name: str) -> NovikovSeries:
    """Derivative of a q-series along a coordinate of the standard co-frame."""
    if name == "t0":
        return NovikovSeries.zero(f.reg, f.order, f.weights)
    return f.qderiv(int(name[4:]) - 1)


def d_series(f: NovikovSeries) -> OneForm:
    return OneForm({n: partial_along(f, n) for n in coframe_names(f.nvars)})


# ---------------------------------------------------------------- substitution


def _exp_shift(exps: Sequence[Fraction], fs: Mapping[int, NovikovSeries], template: NovikovSeries):
    acc = None
    for i, f in fs.items():
        if exps[i] == 0:
            continue
        term = f.scale(exps[i])
        acc = term if acc is None else acc + term
    if acc is None:
        return None
    return series_exp(acc)


def substitute(a, qmap: Mapping[int, NovikovSeries] | None = None, t0_shift=None, prefactor=False):
    """Apply q_i -> q_i exp(f_i) and t0 -> t0 + g.

    NovikovSeries and ExtFunction inputs are handled directly.  For an
    :class:`HJet` with ``prefactor=True`` the jet is read as the coefficient of
    ``exp(t0/hbar)``, so the t0 shift multiplies by ``exp(g/hbar)``.
    """
    qmap = dict(qmap or {})
    for f in qmap.values():
        if not f.constant_term().is_zero() or f.has_negative_exponents():
            raise ValueError("q-substitution series must vanish at q = 0")
    if isinstance(a, HJet):
        out = a.map_series(lambda s: substitute(s, qmap))
        if t0_shift is not None and prefactor:
            out = out * hjet_exp_over_hbar(t0_shift, a.lo)
        return out
    if isinstance(a, ExtFunction):
        series = substitute(a.series, qmap)
        result = ExtFunction({}, series)
        for name, coeff in a.linear.items():
            if name == "t0":
                if t0_shift is not None:
                    result = result + ExtFunction({"t0": coeff}, t0_shift.scale(coeff))
                else:
                    result = result + ExtFunction({"t0": coeff}, NovikovSeries.zero(a.reg, series.order, series.weights))
            else:
                i = int(name[4:]) - 1
                shift = qmap.get(i)
                extra = shift.scale(coeff) if shift is not None else NovikovSeries.zero(a.reg, series.order, series.weights)
                result = result + ExtFunction({name: coeff}, extra)
        return result
    if not qmap:
        return a
    N = a.N
    for f in qmap.values():
        N = lcm(N, f.N)
    forder = min(f.order for f in qmap.values())
    va = a.valuation()
    order = min(a.order, forder + va)
    acc = NovikovSeries.zero(a.reg, order, a.weights)
    for e, c in a.terms.items():
        exps = a.exponents(e)
        mono = NovikovSeries.from_dict(a.reg, {exps: c}, order, a.weights)
        factor = _exp_shift(exps, qmap, a)
        acc = acc + (mono * factor if factor is not None else mono)
    return acc.truncate(order)


def inverse_qmap(qmap: Mapping[int, NovikovSeries]) -> Dict[int, NovikovSeries]:
    """Inverse of q -> q exp(f(q)) in one variable by q-adic fixed-point iteration."""
    if set(qmap) != {0}:
        raise NotImplementedError("inverse maps are implemented for a single Novikov variable")
    f = qmap[0]
    g = -f
    for _ in range(int(f.order * f.N) + 2):
        g_next = -substitute(f, {0: g})
        if g_next.agrees(g):
            return {0: g_next}
        g = g_next
    return {0: g}


# ---------------------------------------------------------------- hbar jets


class HJet:
    """Coefficients c_k of hbar^k for lo <= k <= hi.

    ``expansion='inverse'`` (default) reads the jet as a series in 1/hbar: terms
    below ``lo`` are truncated and terms above ``hi`` are absent.
    ``expansion='positive'`` is the mirror image.
    """

    __slots__ = ("coeffs", "lo", "hi", "expansion", "reg", "order", "weights")

    def __init__(self, coeffs: Mapping[int, NovikovSeries], lo: int, hi: int, expansion="inverse",
                 reg=None, order=None, weights=None):
        if lo > hi:
            raise ValueError("empty hbar window")
        some = next(iter(coeffs.values()), None)
        self.reg = reg if reg is not None else some.reg
        self.order = _frac(order if order is not None else min(c.order for c in coeffs.values()))
        self.weights = tuple(weights if weights is not None else some.weights)
        self.coeffs = {k: v for k, v in coeffs.items() if lo <= k <= hi and not v.is_zero()}
        self.lo, self.hi = lo, hi
        self.expansion = expansion

    def __getitem__(self, k) -> NovikovSeries:
        if not self.lo <= k <= self.hi:
            raise KeyError(f"hbar^{k} outside the valid window [{self.lo}, {self.hi}]")
        c = self.coeffs.get(k)
        return c if c is not None else NovikovSeries.zero(self.reg, self.order, self.weights)

    def map_series(self, f) -> "HJet":
        out = {k: f(v) for k, v in self.coeffs.items()}
        order = min((v.order for v in out.values()), default=self.order)
        return HJet(out, self.lo, self.hi, self.expansion, self.reg, order, self.weights)

    def __add__(self, o: "HJet"):
        if self.expansion == "inverse":
            lo, hi = max(self.lo, o.lo), max(self.hi, o.hi)
        else:
            lo, hi = min(self.lo, o.lo), min(self.hi, o.hi)
        keys = set(self.coeffs) | set(o.coeffs)
        out = {}
        for k in keys:
            if lo <= k <= hi:
                out[k] = self._get(k) + o._get(k)
        return HJet(out, lo, hi, self.expansion, self.reg, min(self.order, o.order), self.weights)

    def _get(self, k):
        c = self.coeffs.get(k)
        return c if c is not None else NovikovSeries.zero(self.reg, self.order, self.weights)

    def __neg__(self):
        return self.map_series(lambda s: -s)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not isinstance(o, HJet):
            return self.map_series(lambda s: s * o)
        if self.expansion != o.expansion:
            raise ValueError("cannot multiply jets of different expansion directions")
        if self.expansion == "inverse":
            hi = self.hi + o.hi
            lo = max(min(self.lo + o.hi, o.lo + self.hi), min(self.lo, o.lo))
        else:
            lo = self.lo + o.lo
            hi = min(max(self.hi + o.lo, o.hi + self.lo), max(self.hi, o.hi))
        out: Dict[int, NovikovSeries] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in o.coeffs.items():
                k = k1 + k2
                if lo <= k <= hi:
                    p = c1 * c2
                    out[k] = p if k not in out else out[k] + p
        return HJet(out, lo, hi, self.expansion, self.reg, min(self.order, o.order), self.weights)

    __rmul__ = __mul__

    def agrees(self, o: "HJet") -> bool:
        lo, hi = max(self.lo, o.lo), min(self.hi, o.hi)
        return all(self[k].agrees(o[k]) for k in range(lo, hi + 1))

    def __eq__(self, o):
        if isinstance(o, HJet):
            return self.agrees(o)
        return NotImplemented

    __hash__ = None

    def text(self) -> str:
        return "; ".join(f"hbar^{k}: {self[k].text()}" for k in range(self.hi, self.lo - 1, -1))

    __str__ = text
    __repr__ = text


def hjet_exp_over_hbar(g: NovikovSeries, lo: int) -> HJet:
    """exp(g/hbar) as a 1/hbar jet truncated below hbar^lo (lo <= 0)."""
    coeffs = {0: NovikovSeries.constant(g.reg, 1, g.order, g.weights)}
    power = coeffs[0]
    fact = Fraction(1)
    for n in range(1, -lo + 1):
        power = power * g
        fact /= n
        coeffs[-n] = power.scale(fact)
    return HJet(coeffs, lo, 0, "inverse", g.reg, g.order, g.weights)


# ---------------------------------------------------------------- canonical text


def _exp_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def series_text(s: NovikovSeries) -> str:
    """Canonical serialization ``coeff * q1^e1 ... qr^er`` sorted by exponent."""
    parts = []
    for exps, c in s.items():
        mono = " ".join(
            f"q{i + 1}" if x == 1 else f"q{i + 1}^{_exp_text(x)}" for i, x in enumerate(exps) if x != 0
        )
        coeff = str(c)
        if len(c.num.terms) > 1 and c.den.is_constant():
            coeff = f"({coeff})"
        parts.append(coeff if not mono else f"{coeff} * {mono}")
    body = " + ".join(parts) if parts else "0"
    return f"{body} + O({_exp_text(s.order)})"
