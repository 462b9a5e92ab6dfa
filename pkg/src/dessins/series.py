"""Truncated multivariate power series with weighted-degree truncation.

A series lives in a :class:`Space` (ordered variables, integer weights and a
maximal weight D).  Coefficients come from one ring per series: Fraction,
LaurentPoly, mpmath.mpf or Dual.  Operations never mix spaces; use
:meth:`TruncatedSeries.truncate` or :meth:`TruncatedSeries.compose` to move
between them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .rings import Dual, LaurentPoly, PARAMS, coeff_from_str, coeff_to_str, ring_sqrt


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class Space:
    vars: tuple
    weights: tuple
    max_weight: int

    def __post_init__(self):
        if len(self.vars) != len(self.weights):
            raise SeriesError("vars and weights differ in length")
        if len(set(self.vars)) != len(self.vars):
            raise SeriesError("duplicate variable names")

    def index(self, name):
        try:
            return self.vars.index(name)
        except ValueError:
            raise SeriesError(f"unknown variable {name!r}") from None

    def weight_of(self, exp) -> int:
        return sum(e * w for e, w in zip(exp, self.weights))

    def with_max(self, D):
        return Space(self.vars, self.weights, D)


def time_space(D, prefix="t", extra=()):
    """Space of times t1..tD (weight r) plus extra (name, weight) pairs."""
    names = tuple(f"{prefix}{r}" for r in range(1, D + 1))
    weights = tuple(range(1, D + 1))
    for n, w in extra:
        names += (n,)
        weights += (w,)
    return Space(names, weights, D)


def _norm(c):
    return Fraction(c) if isinstance(c, int) else c


def _is_zero(c):
    if isinstance(c, Dual):
        return c.v == 0 and all(x == 0 for x in c.d)
    return c == 0


class TruncatedSeries:
    __slots__ = ("space", "terms")

    def __init__(self, space: Space, terms=None, _trusted=False):
        self.space = space
        if _trusted:
            self.terms = terms
            return
        self.terms = {}
        if terms:
            n = len(space.vars)
            for k, v in terms.items():
                k = tuple(k)
                if len(k) != n:
                    raise SeriesError("exponent length mismatch")
                if min(k, default=0) < 0:
                    raise SeriesError("negative exponent")
                if space.weight_of(k) <= space.max_weight and not _is_zero(v):
                    self.terms[k] = v

    # constructors
    @classmethod
    def zero(cls, space):
        return cls(space, {}, _trusted=True)

    @classmethod
    def const(cls, space, c):
        c = _norm(c)
        if _is_zero(c):
            return cls.zero(space)
        return cls(space, {(0,) * len(space.vars): c}, _trusted=True)

    @classmethod
    def var(cls, space, name, coeff=1):
        i = space.index(name)
        e = [0] * len(space.vars)
        e[i] = 1
        return cls(space, {tuple(e): _norm(coeff)})

    @classmethod
    def monomial(cls, space, exps: dict, coeff=1):
        e = [0] * len(space.vars)
        for n, p in exps.items():
            e[space.index(n)] = p
        return cls(space, {tuple(e): _norm(coeff)})

    # basic access
    @property
    def max_weight(self):
        return self.space.max_weight

    @property
    def vars(self):
        return self.space.vars

    def constant(self):
        return self.terms.get((0,) * len(self.space.vars), 0)

    def coeff(self, exps=None, **kw):
        exps = dict(exps or {}, **kw)
        e = [0] * len(self.space.vars)
        for n, p in exps.items():
            e[self.space.index(n)] = p
        return self.terms.get(tuple(e), 0)

    def is_zero(self):
        return not self.terms

    def min_weight(self):
        """Lowest weight carrying a nonzero coefficient (None for zero)."""
        if not self.terms:
            return None
        return min(self.space.weight_of(k) for k in self.terms)

    def graded(self):
        """List of homogeneous components, index = weight."""
        comps = [dict() for _ in range(self.max_weight + 1)]
        for k, v in self.terms.items():
            comps[self.space.weight_of(k)][k] = v
        return comps

    def homogeneous(self, w):
        return TruncatedSeries(self.space, {k: v for k, v in self.terms.items()
                                            if self.space.weight_of(k) == w}, _trusted=True)

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            return False
        if other.space != self.space:
            raise SeriesError(
                f"series mismatch: {self.space.vars}/D={self.max_weight} vs "
                f"{other.space.vars}/D={other.max_weight}")
        return True

    # arithmetic
    def __add__(self, other):
        if not self._check(other):
            other = TruncatedSeries.const(self.space, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            if k in out:
                s = out[k] + v
                if _is_zero(s):
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = v
        return TruncatedSeries(self.space, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.space, {k: -v for k, v in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.const(self.space, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _norm(c)
        if _is_zero(c):
            return TruncatedSeries.zero(self.space)
        out = {}
        for k, v in self.terms.items():
            p = v * c
            if not _is_zero(p):
                out[k] = p
        return TruncatedSeries(self.space, out, _trusted=True)

    def __mul__(self, other):
        if not self._check(other):
            return self.scale(other)
        sp = self.space
        D = sp.max_weight
        a = [(k, v, sp.weight_of(k)) for k, v in self.terms.items()]
        b = [(k, v, sp.weight_of(k)) for k, v in other.terms.items()]
        b.sort(key=lambda x: x[2])
        out = {}
        for k1, v1, w1 in a:
            room = D - w1
            for k2, v2, w2 in b:
                if w2 > room:
                    break
                k = tuple(x + y for x, y in zip(k1, k2))
                if k in out:
                    out[k] = out[k] + v1 * v2
                else:
                    out[k] = v1 * v2
        return TruncatedSeries(sp, {k: v for k, v in out.items() if not _is_zero(v)}, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        if isinstance(other, int):
            other = Fraction(other)
        return self.scale(1 / other)

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def __pow__(self, n):
        if not isinstance(n, int):
            return self.power(n)
        if n < 0:
            return self.inverse() ** (-n)
        r = TruncatedSeries.const(self.space, 1)
        b = self
        while n:
            if n & 1:
                r = r * b
            n >>= 1
            if n:
                b = b * b
        return r

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.space == other.space and self.terms == other.terms
        if _is_zero(other):
            return not self.terms
        return self.terms == {(0,) * len(self.space.vars): other}

    def __hash__(self):
        return hash((self.space, frozenset(self.terms.items())))

    # transcendental operations via the Euler operator on weight components
    def _from_components(self, comps):
        out = {}
        for comp in comps:
            for k, v in comp.items():
                if not _is_zero(v):
                    out[k] = v
        return TruncatedSeries(self.space, out, _trusted=True)

    @staticmethod
    def _comp_mul(x, y, sp, cap):
        out = {}
        for k1, v1 in x.items():
            for k2, v2 in y.items():
                k = tuple(p + q for p, q in zip(k1, k2))
                out[k] = out[k] + v1 * v2 if k in out else v1 * v2
        return out

    @staticmethod
    def _comp_axpy(acc, comp, c):
        for k, v in comp.items():
            acc[k] = acc[k] + c * v if k in acc else c * v

    def exp(self):
        """exp of a series with zero constant term."""
        if not _is_zero(self.constant()):
            raise SeriesError("exp requires zero constant term")
        a = self.graded()
        D = self.max_weight
        zero = (0,) * len(self.space.vars)
        f = [dict() for _ in range(D + 1)]
        f[0] = {zero: Fraction(1) if self._exactish() else self._one()}
        for n in range(1, D + 1):
            acc = {}
            for k in range(1, n + 1):
                if a[k] and f[n - k]:
                    self._comp_axpy(acc, self._comp_mul(a[k], f[n - k], self.space, D), k)
            f[n] = {key: v * Fraction(1, n) for key, v in acc.items()}
        return self._from_components(f)

    def _exactish(self):
        for v in self.terms.values():
            return isinstance(v, (int, Fraction))
        return True

    def _one(self):
        for v in self.terms.values():
            if isinstance(v, LaurentPoly):
                return LaurentPoly.const(v.vars, 1)
            if isinstance(v, Dual):
                return Dual(1, (0,) * len(v.d))
            return v * 0 + 1
        return Fraction(1)

    def log(self):
        """log of a series with constant term 1."""
        if self.constant() != 1:
            raise SeriesError("log requires constant term 1")
        f = self.graded()
        D = self.max_weight
        g = [dict() for _ in range(D + 1)]
        for n in range(1, D + 1):
            acc = {}
            self._comp_axpy(acc, f[n], n)
            for k in range(1, n):
                if g[k] and f[n - k]:
                    self._comp_axpy(acc, self._comp_mul(g[k], f[n - k], self.space, D), -k)
            g[n] = {key: v * Fraction(1, n) for key, v in acc.items()}
        return self._from_components(g)

    def inverse(self):
        c = self.constant()
        if _is_zero(c):
            raise SeriesError("series with zero constant term is not invertible")
        if isinstance(c, int):
            c = Fraction(c)
        inv_c = 1 / c
        u = self.scale(inv_c) - 1  # zero constant term
        # geometric series, each power of u raises the minimal weight by >= 1
        D = self.max_weight
        r = TruncatedSeries.const(self.space, 1)
        p = TruncatedSeries.const(self.space, 1)
        for _ in range(D):
            p = p * (-u)
            if p.is_zero():
                break
            r = r + p
        return r.scale(inv_c)

    def power(self, r, root=None):
        """self**r for rational r; root is the chosen value of c0**r."""
        c = self.constant()
        if _is_zero(c):
            raise SeriesError("power needs a nonzero constant term")
        r = Fraction(r)
        if root is None:
            if r.denominator == 1:
                root = Fraction(c) ** int(r) if isinstance(c, (int, Fraction)) else c ** int(r)
            elif r.denominator == 2:
                s = ring_sqrt(c)
                root = s ** (2 * r.numerator) if r.numerator >= 0 else 1 / s ** (-r.numerator)
                if isinstance(s, Fraction) or isinstance(s, int):
                    root = Fraction(s) ** r.numerator
            else:
                root = mpmath.mpf(c) ** (mpmath.mpf(r.numerator) / r.denominator)
        if isinstance(c, int):
            c = Fraction(c)
        u = self.scale(1 / c) - 1
        # binomial series (1+u)^r
        D = self.max_weight
        total = TruncatedSeries.const(self.space, 1)
        term = TruncatedSeries.const(self.space, 1)
        binom = Fraction(1)
        for n in range(1, D + 1):
            term = term * u
            if term.is_zero():
                break
            binom = binom * (r - n + 1) / n
            total = total + term.scale(binom)
        return total.scale(root)

    def sqrt(self, root=None):
        return self.power(Fraction(1, 2), root)

    # calculus and restructuring
    def differentiate(self, name):
        i = self.space.index(name)
        w = self.space.weights[i]
        sp = self.space.with_max(self.max_weight - w)
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                kk = tuple(kk)
                if sp.weight_of(kk) <= sp.max_weight:
                    out[kk] = v * k[i]
        return TruncatedSeries(sp, out, _trusted=True)

    def truncate(self, D):
        if D > self.max_weight:
            raise SeriesError(f"cannot raise truncation from {self.max_weight} to {D}")
        sp = self.space.with_max(D)
        return TruncatedSeries(sp, {k: v for k, v in self.terms.items()
                                    if sp.weight_of(k) <= D}, _trusted=True)

    def extend(self, D):
        """Reinterpret in a space with larger max weight (no new information)."""
        return TruncatedSeries(self.space.with_max(D), dict(self.terms), _trusted=True)

    def map_coeffs(self, fn, space=None):
        out = {}
        for k, v in self.terms.items():
            c = fn(v)
            if not _is_zero(c):
                out[k] = c
        return TruncatedSeries(space or self.space, out, _trusted=True)

    def compose(self, target: Space, mapping: dict, coeff_fn=None):
        """Substitute variables: mapping name -> TruncatedSeries in target (or
        scalar).  Variables absent from mapping must exist in target."""
        images = []
        for n in self.space.vars:
            if n in mapping:
                img = mapping[n]
                if not isinstance(img, TruncatedSeries):
                    img = TruncatedSeries.const(target, img)
                elif img.space != target:
                    raise SeriesError(f"image of {n} lives in another space")
            else:
                img = TruncatedSeries.var(target, n)
            images.append(img)
        cache = {}

        def pw(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = images[i] ** e if e > 1 else images[i]
            return cache[key]

        total = TruncatedSeries.zero(target)
        for k, v in sorted(self.terms.items()):
            c = coeff_fn(v) if coeff_fn else v
            if _is_zero(c):
                continue
            term = TruncatedSeries.const(target, c)
            for i, e in enumerate(k):
                if e:
                    term = term * pw(i, e)
                    if term.is_zero():
                        break
            total = total + term
        return total

    def shift_down(self, name, k):
        """Divide by name**k, requiring exact divisibility."""
        i = self.space.index(name)
        w = self.space.weights[i]
        sp = self.space.with_max(self.max_weight - k * w)
        out = {}
        for e, v in self.terms.items():
            if e[i] < k:
                raise SeriesError(f"series not divisible by {name}^{k}")
            ee = list(e)
            ee[i] -= k
            out[tuple(ee)] = v
        return TruncatedSeries(sp, out, _trusted=True)

    # numerics and io
    def evaluate(self, **values):
        total = 0
        for k, v in self.terms.items():
            term = v
            for n, e in zip(self.space.vars, k):
                if e:
                    term = term * values[n] ** e
            total = total + term
        return total

    def max_abs(self):
        m = 0
        for v in self.terms.values():
            a = abs(v) if not isinstance(v, LaurentPoly) else max(abs(c) for c in v.terms.values())
            if a > m:
                m = a
        return m

    def to_json(self) -> dict:
        terms = []
        for k in sorted(self.terms):
            v = self.terms[k]
            if isinstance(v, LaurentPoly):
                c = {"poly_vars": list(v.vars),
                     "poly": [[list(e), coeff_to_str(x)] for e, x in sorted(v.terms.items())]}
            else:
                c = coeff_to_str(v)
            terms.append({"exp": list(k), "coeff": c})
        return {"vars": list(self.space.vars), "weights": list(self.space.weights),
                "max_weight": self.max_weight, "terms": terms}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        vars = tuple(obj["vars"])
        weights = tuple(obj.get("weights") or _default_weights(vars))
        sp = Space(vars, weights, obj["max_weight"])
        terms = {}
        for t in obj["terms"]:
            c = t["coeff"]
            if isinstance(c, dict):
                c = LaurentPoly(c["poly_vars"], {tuple(e): Fraction(x) for e, x in c["poly"]})
            else:
                c = coeff_from_str(c)
            terms[tuple(t["exp"])] = c
        return cls(sp, terms)

    def __repr__(self):
        return f"TruncatedSeries(D={self.max_weight}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda e: (self.space.weight_of(e), e)):
            v = self.terms[k]
            mon = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(self.space.vars, k) if e)
            cs = f"({v})" if isinstance(v, LaurentPoly) else (str(v) if isinstance(v, Fraction) else coeff_to_str(v))
            parts.append(cs if not mon else f"{cs}*{mon}")
        return " + ".join(parts)


def _default_weights(vars):
    ws = []
    for n in vars:
        digits = "".join(ch for ch in n if ch.isdigit())
        ws.append(int(digits) if digits else 1)
    return ws


class GenusSeries:
    """Genus-graded generating function: genus -> TruncatedSeries with
    LaurentPoly coefficients in (beta, gamma, N).  The N^(2-2g) factor is
    implicit and restored by :meth:`total`."""

    def __init__(self, per_genus: dict, space: Space):
        self.space = space
        self.per_genus = {g: s for g, s in per_genus.items() if not s.is_zero()}

    def __getitem__(self, g):
        return self.per_genus.get(g, TruncatedSeries.zero(self.space))

    def genera(self):
        return sorted(self.per_genus)

    def total(self):
        """Sum over genera with the N^(2-2g) factor restored."""
        tot = TruncatedSeries.zero(self.space)
        for g, s in self.per_genus.items():
            Npow = LaurentPoly.var(PARAMS, "N", 2 - 2 * g) if g != 1 else LaurentPoly.const(PARAMS, 1)
            tot = tot + s.scale(Npow)
        return tot

    def map(self, fn):
        return GenusSeries({g: fn(s) for g, s in self.per_genus.items()}, self.space)

    def __eq__(self, other):
        return isinstance(other, GenusSeries) and self.per_genus == other.per_genus


def newton_solve(residual, seeds, space: Space, max_iter=None, tol=None):
    """Solve residual(x) = 0 for a list x of series with given constant terms.

    ``residual`` maps a list of series (or of Dual numbers, for the weight-0
    Jacobian) to a list of the same length; it must only use ring
    operations.  Iterates x <- x - J0^{-1} F(x), gaining at least one weight
    per step.  Raises SeriesError on a singular J0 or non-convergence.
    """
    n = len(seeds)
    duals = [TruncatedSeries.const(space, Dual(s, [1 if j == i else 0 for j in range(n)]))
             for i, s in enumerate(seeds)]
    F0 = [f.constant() for f in residual(duals)]
    J = [[(F0[i].d[j] if isinstance(F0[i], Dual) else 0) for j in range(n)] for i in range(n)]
    for i in range(n):
        v = F0[i].v if isinstance(F0[i], Dual) else F0[i]
        if (tol is None and v != 0) or (tol is not None and abs(v) > tol):
            raise SeriesError(f"seed does not solve the weight-0 system (residual {v})")
    Jinv = _invert(J)
    x = [TruncatedSeries.const(space, s) for s in seeds]
    iters = max_iter or space.max_weight + 2
    for _ in range(iters + 1):
        F = residual(x)
        if all(_small(f, tol) for f in F):
            return x
        x = [x[i] - sum((F[j].scale(Jinv[i][j]) for j in range(n) if not _is_zero(Jinv[i][j])),
                        TruncatedSeries.zero(space)) for i in range(n)]
    F = residual(x)
    orders = [f.min_weight() for f in F if not _small(f, tol)]
    if orders:
        raise SeriesError(f"newton_solve did not converge; residual survives at weight {min(orders)}")
    return x


def _small(f, tol):
    if tol is None:
        return f.is_zero()
    return all(abs(_as_mpf(v)) <= tol for v in f.terms.values())


def _as_mpf(v):
    return mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v


def _invert(J):
    n = len(J)
    A = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(J)]
    A = [[Fraction(v) if isinstance(v, int) else v for v in row] for row in A]
    if any(isinstance(v, mpmath.mpf) for row in A for v in row):
        A = [[mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v for v in row]
             for row in A]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(A[r][c]))
        if A[piv][c] == 0 or (not isinstance(A[piv][c], Fraction) and abs(A[piv][c]) < mpmath.mpf(2) ** (-mpmath.mp.prec // 2)):
            raise SeriesError("singular weight-0 Jacobian")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [v / p for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]
