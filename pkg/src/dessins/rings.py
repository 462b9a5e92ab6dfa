"""Coefficient rings: exact rationals, Laurent polynomials in named
parameters, and mpmath floats, plus a small dual-number type used to get
exact Jacobians."""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from numbers import Rational

import mpmath

log = logging.getLogger(__name__)

DEFAULT_PRECISION_BITS = 256


def is_zero(c) -> bool:
    return c == 0


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def exact_sqrt(x: Fraction) -> Fraction:
    x = as_fraction(x)
    if x < 0:
        raise ValueError(f"negative square root argument {x}")
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        raise ValueError(f"{x} is not a rational square")
    return Fraction(n, d)


def ring_sqrt(c):
    """Square root of a coefficient in its own ring (principal branch)."""
    if isinstance(c, Dual):
        return c.sqrt()
    if isinstance(c, (int, Fraction)):
        return exact_sqrt(c)
    return mpmath.sqrt(c)


def promote(c, prec: int = DEFAULT_PRECISION_BITS):
    """Lossy promotion of an exact coefficient to a BigFloat."""
    if isinstance(c, (int, Fraction)):
        with mpmath.workprec(prec):
            v = mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c)
        if isinstance(c, Fraction) and c.denominator & (c.denominator - 1):
            log.debug("lossy promotion of %s to %d-bit float", c, prec)
        return v
    return c


def coeff_to_str(c) -> str:
    if isinstance(c, (int, Fraction)):
        c = Fraction(c)
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, mpmath.mpf):
        return mpmath.nstr(c, int(mpmath.mp.prec * 0.30103) + 2, min_fixed=1, max_fixed=0)
    if isinstance(c, LaurentPoly):
        return str(c)
    return str(c)


def coeff_from_str(s: str):
    if "/" in s:
        return Fraction(s)
    return mpmath.mpf(s)


class LaurentPoly:
    """Sparse Laurent polynomial in named variables with rational coefficients.

    Used for the formal parameters (beta, gamma, N) of the generating function
    and, with more variables, as the numerator/denominator of rational
    functions in the Schwinger-Dyson check.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        self.terms: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for k, v in terms.items():
                if v != 0:
                    self.terms[tuple(k)] = Fraction(v)

    @classmethod
    def const(cls, vars, c):
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars, name, power=1):
        e = [0] * len(vars)
        e[list(vars).index(name)] = power
        return cls(vars, {tuple(e): 1})

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        r = LaurentPoly(self.vars)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = LaurentPoly(self.vars)
        r.terms = {k: -v for k, v in self.terms.items()}
        return r

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return LaurentPoly(self.vars)
            r = LaurentPoly(self.vars)
            r.terms = {k: v * other for k, v in self.terms.items()}
            return r
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return LaurentPoly(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, LaurentPoly) and len(other.terms) == 1:
            (k, v), = other.terms.items()
            return self * LaurentPoly(self.vars, {tuple(-e for e in k): 1 / v})
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            return (LaurentPoly.const(self.vars, 1) / self) ** (-n)
        r = LaurentPoly.const(self.vars, 1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self.terms == {(0,) * len(self.vars): Fraction(other)}
        if isinstance(other, LaurentPoly):
            return self.vars == other.vars and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def diff(self, name):
        i = self.vars.index(name)
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = v * k[i]
        return LaurentPoly(self.vars, out)

    def evaluate(self, **values):
        """Substitute values for all variables (missing ones are an error)."""
        total = 0
        vals = [values[v] for v in self.vars]
        for k, c in self.terms.items():
            term = c
            for x, e in zip(vals, k):
                if e:
                    term = term * (x ** e if e > 0 else 1 / x ** (-e))
            total = total + term
        return total

    def partial_evaluate(self, **values):
        keep = [v for v in self.vars if v not in values]
        idx = [self.vars.index(v) for v in keep]
        out: dict = {}
        for k, c in self.terms.items():
            term = Fraction(c)
            for v, e in zip(self.vars, k):
                if v in values and e:
                    x = Fraction(values[v])
                    term *= x ** e
            kk = tuple(k[i] for i in idx)
            out[kk] = out.get(kk, 0) + term
        return LaurentPoly(keep, out)

    def swap(self, a, b):
        ia, ib = self.vars.index(a), self.vars.index(b)
        out = {}
        for k, v in self.terms.items():
            kk = list(k)
            kk[ia], kk[ib] = kk[ib], kk[ia]
            out[tuple(kk)] = v
        return LaurentPoly(self.vars, out)

    def degree(self, name):
        i = self.vars.index(name)
        return max((k[i] for k in self.terms), default=0)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            c = self.terms[k]
            mon = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, k) if e
            )
            cs = str(c)
            if not mon:
                parts.append(cs)
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{cs}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")


PARAMS = ("beta", "gamma", "N")


def param(name: str, power: int = 1) -> LaurentPoly:
    return LaurentPoly.var(PARAMS, name, power)


class Dual:
    """Forward-mode dual number with a vector of first derivatives."""

    __slots__ = ("v", "d")

    def __init__(self, v, d):
        self.v = v
        self.d = tuple(d)

    def _lift(self, o):
        if isinstance(o, Dual):
            return o
        return Dual(o, (0,) * len(self.d))

    def __add__(self, o):
        o = self._lift(o)
        return Dual(self.v + o.v, [a + b for a, b in zip(self.d, o.d)])

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.v, [-a for a in self.d])

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Dual(self.v * o.v, [self.v * b + o.v * a for a, b in zip(self.d, o.d)])

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        inv = 1 / o.v if not isinstance(o.v, int) else Fraction(1, o.v)
        return Dual(self.v * inv, [(a * o.v - self.v * b) * inv * inv for a, b in zip(self.d, o.d)])

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __pow__(self, n: int):
        r = Dual(1, (0,) * len(self.d))
        for _ in range(n):
            r = r * self
        return r

    def sqrt(self):
        s = ring_sqrt(self.v)
        return Dual(s, [a / (2 * s) for a in self.d])

    def __eq__(self, o):
        o = self._lift(o)
        return self.v == o.v and all(a == b for a, b in zip(self.d, o.d))

    def __hash__(self):
        return hash((self.v, self.d))
