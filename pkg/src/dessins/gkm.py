"""Generalized Kontsevich determinant formulas.

A kernel is stored as f(xi) = sum_k c_k xi^-(m+k+1): the p-trick makes the
two-log kernel a finite sum, while the clean and two-profile kernels are
asymptotic in 1/xi and kept to the order needed.  Partition functions are
assembled as Wronskian ratios in the Miwa scale eps, xi_j = 1/(eps*lam_j)^2.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .rings import LaurentPoly
from .series import Space, TruncatedSeries


class KernelError(ValueError):
    pass


class Variant(enum.Enum):
    TWO_LOG = "two-log"
    CLEAN = "clean"
    TWO_PROFILE = "two-profile"


def rising(x, n):
    r = 1
    for i in range(n):
        r *= x + i
    return r


def gamma_moment(m: int, xi, N=1):
    """int_0^oo x^m e^(-N x xi) dx = m!/(N xi)^(m+1)."""
    if m < 0:
        raise KernelError("gamma_moment needs m >= 0")
    return Fraction(factorial(m)) / (Fraction(N) * Fraction(xi)) ** (m + 1)


@dataclass
class KernelSpec:
    variant: Variant
    m: int                       # exponent of x, (gamma-alpha)N or N(beta-gamma)
    N: int = 1
    p: int = 0                   # -beta*N for two-log and clean
    shift: Fraction = Fraction(0)  # clean kernel at xi - beta (loose profile)
    times: TruncatedSeries | None = None  # two-profile only, series in t1..tD
    order: int | None = None     # number of asymptotic terms kept

    def __post_init__(self):
        if isinstance(self.variant, str):
            self.variant = Variant(self.variant)
        if self.m < 0 or int(self.m) != self.m:
            raise KernelError(f"exponent m={self.m} must be a nonnegative integer")
        if self.p < 0 or int(self.p) != self.p:
            raise KernelError(f"p={self.p} must be a nonnegative integer")
        if self.variant is Variant.CLEAN and self.p < 1:
            raise KernelError("clean kernel needs p >= 1")
        if self.variant is Variant.TWO_PROFILE and self.times is None:
            raise KernelError("two-profile kernel needs a times series")


@dataclass
class Kernel:
    """f(xi) = sum_k coeffs[k] * xi^-(m+k+1)."""
    m: int
    coeffs: dict
    asymptotic: bool = False
    order: int | None = None

    def value(self, xi):
        if self.asymptotic:
            raise KernelError("asymptotic kernel has no pointwise value")
        xi = Fraction(xi)
        return sum(c * xi ** -(self.m + k + 1) for k, c in self.coeffs.items())

    def derivative_value(self, xi, n):
        if self.asymptotic:
            raise KernelError("asymptotic kernel has no pointwise value")
        xi = Fraction(xi)
        return sum(c * (-1) ** n * rising(self.m + k + 1, n) * xi ** -(self.m + k + 1 + n)
                   for k, c in self.coeffs.items())


def kernel(spec: KernelSpec, order=None) -> Kernel:
    N, m = Fraction(spec.N), spec.m
    order = order if order is not None else spec.order
    if spec.variant is Variant.TWO_LOG:
        # int x^m (1-x)^p e^{-N x xi}
        coeffs = {l: comb(spec.p, l) * (-1) ** l * Fraction(factorial(m + l)) / N ** (m + l + 1)
                  for l in range(spec.p + 1)}
        return Kernel(m, coeffs)
    if spec.variant is Variant.CLEAN:
        if order is None:
            raise KernelError("clean kernel is asymptotic: give an order")
        # e^{-(p/2) x^2} expanded termwise
        base = {}
        for k in range(0, order // 2 + 1):
            base[2 * k] = Fraction(-spec.p, 2) ** k / factorial(k) * factorial(m + 2 * k) / N ** (m + 2 * k + 1)
        coeffs = _shift(base, m, Fraction(spec.shift), order) if spec.shift else base
        return Kernel(m, coeffs, asymptotic=True, order=order)
    # two-profile: exp(N sum t_r x^r / r) = sum_k A_k(t) x^k, A_k of t-weight k
    t = spec.times
    D = t.max_weight if order is None else order
    sp = t.space
    pot = TruncatedSeries.zero(sp)
    for r in range(1, sp.max_weight + 1):
        name = f"t{r}"
        if name in sp.vars:
            pot = pot + TruncatedSeries.var(sp, name).scale(N / r)
    A = pot.exp().graded()
    coeffs = {}
    for k in range(0, D + 1):
        ck = TruncatedSeries(sp, A[k]) if k < len(A) else TruncatedSeries.zero(sp)
        coeffs[k] = ck.scale(Fraction(factorial(m + k)) / N ** (m + k + 1))
    return Kernel(m, coeffs, asymptotic=True, order=D)


def _shift(coeffs, m, beta, order):
    """Coefficients of f(xi - beta) in powers xi^-(m+k+1), k <= order."""
    out = {}
    for k, c in coeffs.items():
        s = m + k + 1
        for l in range(0, order - k + 1):
            out[k + l] = out.get(k + l, 0) + c * comb(s + l - 1, l) * beta ** l
    return out


def det(M):
    """Laplace/Leibniz determinant for the small matrices used here."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    total = None
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = M[0][perm[0]]
        for i in range(1, n):
            term = term * M[i][perm[i]]
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return total


def _perm_sign(p):
    s = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def wronskian_ratio(kern: Kernel, xis):
    """det[f^(i-1)(xi_j)] / prod_{i<j}(xi_j - xi_i) at rational points."""
    xis = [Fraction(x) for x in xis]
    if len(set(xis)) != len(xis):
        raise KernelError("coincident points: confluent limit not supported")
    n = len(xis)
    M = [[kern.derivative_value(x, i) for x in xis] for i in range(n)]
    vdm = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            vdm *= xis[j] - xis[i]
    return det(M) / vdm


def wronskian_series(kern: Kernel, lambdas, space: Space, eps="eps", prefactor=None):
    """prod xi^P det[f^(i-1)(xi_j)]/Delta(xi) as a series in eps, with
    xi_j = 1/(eps*lambda_j)^2 and P = n + m (the prefactor exponent).

    Keeps only nonnegative eps powers by working with u_j = (eps lam_j)^2:
    column j is multiplied by u_j^(n-1) and the result divided by
    prod_{i<j}(u_i - u_j).  ``space`` must contain eps and have room for the
    extra n(n-1) orders; the returned series has max weight reduced by that.
    """
    lam = [Fraction(x) for x in lambdas]
    n = len(lam)
    if len({l * l for l in lam}) != n:
        raise KernelError("coincident points: confluent limit not supported")
    if prefactor is not None and prefactor != n + kern.m:
        raise KernelError(f"prefactor exponent {prefactor} differs from n+m = {n + kern.m}")
    e = TruncatedSeries.var(space, eps)
    e2 = e * e
    u = [(e2).scale(l * l) for l in lam]
    upow = {}

    def up(j, k):
        if (j, k) not in upow:
            upow[(j, k)] = u[j] ** k
        return upow[(j, k)]

    def lift(c):
        if isinstance(c, TruncatedSeries):
            if c.space.vars == space.vars:
                return c.extend(space.max_weight).truncate(space.max_weight) if c.max_weight >= space.max_weight else c.extend(space.max_weight)
            return c.compose(space, {})
        return c

    coeffs = {k: lift(c) for k, c in kern.coeffs.items()}
    W = space.max_weight
    M = []
    for i in range(n):
        row = []
        for j in range(n):
            ent = TruncatedSeries.zero(space)
            for k, c in coeffs.items():
                if 2 * (k + i) > W:
                    continue
                factor = (-1) ** i * rising(kern.m + k + 1, i)
                term = up(j, k + i)
                term = term * c if isinstance(c, TruncatedSeries) else term.scale(c)
                ent = ent + term.scale(factor)
            row.append(ent)
        M.append(row)
    num = det(M)
    const = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            const *= lam[i] ** 2 - lam[j] ** 2
    shifted = num.shift_down(eps, n * (n - 1))
    return shifted.scale(1 / const)


def assemble(spec: KernelSpec, lambdas, order: int, eps="eps", space=None):
    """e^F from the kernel as a series with constant term 1.

    Returns (series, raw_constant).  ``order`` is the eps order kept (for the
    two-profile kernel the combined weight in t and eps).
    """
    n = len(lambdas)
    pad = n * (n - 1)
    if spec.variant is Variant.TWO_PROFILE:
        tsp = spec.times.space
        names = tsp.vars + (eps,)
        weights = tsp.weights + (1,)
        sp = Space(names, weights, order + pad)
        kern = kernel(spec, order=tsp.max_weight)
    else:
        sp = Space((eps,), (1,), order + pad)
        kern = kernel(spec, order=(order + pad) // 2 + 1)
    Z = wronskian_series(kern, lambdas, sp, eps)
    c0 = Z.constant()
    if c0 == 0:
        raise KernelError("vanishing constant term: prefactor bookkeeping broken")
    return Z.scale(1 / c0), c0


def twolog_spec(params, n_points=None):
    N = params.N
    n = params.size("alpha")
    if n_points is not None and n_points != n:
        raise KernelError(f"{n_points} points given but alpha*N = {n}")
    m = params.size("gamma") - n
    p = -params.beta * N
    if p.denominator != 1 or p < 0:
        raise KernelError("p-trick needs beta*N a nonpositive integer")
    return KernelSpec(Variant.TWO_LOG, m=m, N=int(N), p=int(p))


def clean_spec(params, order, shifted=False):
    N = params.N
    m = params.size("gamma") - params.size("alpha")
    p = -params.beta * N
    if p.denominator != 1 or p < 1:
        raise KernelError("clean kernel needs -beta*N a positive integer")
    return KernelSpec(Variant.CLEAN, m=m, N=int(N), p=int(p), order=order,
                      shift=params.beta if shifted else Fraction(0))


def two_profile_spec(gamma, n_points, N, times):
    """Points carry the second profile; gamma weighs the remaining point."""
    m = Fraction(gamma) * N - n_points
    if m.denominator != 1 or m < 0:
        raise KernelError(f"gamma*N - n = {m} must be a nonnegative integer")
    return KernelSpec(Variant.TWO_PROFILE, m=int(m), N=int(N), times=times)


def gkm_partition(spec: KernelSpec, lambdas, order, eps="eps"):
    Z, _ = assemble(spec, lambdas, order, eps)
    return Z


# --- exact rational-exponential functions for the Schwinger-Dyson check ---

class RationalFunction:
    """num/den with LaurentPoly numerator and denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        self.num = num
        self.den = den if den is not None else LaurentPoly.const(num.vars, 1)

    @property
    def vars(self):
        return self.num.vars

    def __add__(self, o):
        if not isinstance(o, RationalFunction):
            o = RationalFunction(LaurentPoly.const(self.vars, o))
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, o):
        return self + (-o if isinstance(o, RationalFunction) else -Fraction(o))

    def __mul__(self, o):
        if isinstance(o, RationalFunction):
            return RationalFunction(self.num * o.num, self.den * o.den)
        if isinstance(o, LaurentPoly):
            return RationalFunction(self.num * o, self.den)
        return RationalFunction(self.num * Fraction(o), self.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, RationalFunction):
            return RationalFunction(self.num * o.den, self.den * o.num)
        if isinstance(o, LaurentPoly):
            return RationalFunction(self.num, self.den * o)
        return RationalFunction(self.num / Fraction(o), self.den)

    def diff(self, name):
        if len(self.den.terms) == 1 and self.den == LaurentPoly.const(self.vars, 1):
            return RationalFunction(self.num.diff(name), self.den)
        return RationalFunction(self.num.diff(name) * self.den - self.num * self.den.diff(name),
                                self.den * self.den)

    def evaluate(self, **vals):
        d = self.den.evaluate(**vals)
        if d == 0:
            raise ZeroDivisionError("pole at evaluation point")
        return Fraction(self.num.evaluate(**vals)) / d


class RatExpFunction:
    """Finite sum of exp(rate . lambda) * R(lambda), rate a tuple of
    rationals per variable; exactly closed under d/dlambda_i."""

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        self.terms: dict[tuple, RationalFunction] = dict(terms or {})

    @classmethod
    def exp_times(cls, vars, rates, R: RationalFunction):
        return cls(vars, {tuple(Fraction(r) for r in rates): R})

    def __add__(self, o):
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out[k] + v if k in out else v
        return RatExpFunction(self.vars, out)

    def __neg__(self):
        return RatExpFunction(self.vars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, RatExpFunction):
            out = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in o.terms.items():
                    k = tuple(a + b for a, b in zip(k1, k2))
                    out[k] = out[k] + v1 * v2 if k in out else v1 * v2
            return RatExpFunction(self.vars, out)
        return RatExpFunction(self.vars, {k: v * o for k, v in self.terms.items()})

    __rmul__ = __mul__

    def diff(self, name):
        i = self.vars.index(name)
        out = {}
        for k, R in self.terms.items():
            d = R.diff(name)
            if k[i]:
                d = d + R * k[i]
            out[k] = d
        return RatExpFunction(self.vars, out)

    def evaluate_parts(self, **vals):
        """{rate: rational value}; the function equals sum exp(rate.lam)*value."""
        out = {}
        for k, R in self.terms.items():
            v = R.evaluate(**vals)
            if v:
                out[k] = out.get(k, 0) + v
        return {k: v for k, v in out.items() if v}

    def evaluate_float(self, **vals):
        import mpmath
        tot = mpmath.mpf(0)
        for k, v in self.evaluate_parts(**vals).items():
            tot += mpmath.exp(sum(r * Fraction(vals[n]) for r, n in zip(k, self.vars))) * v
        return tot


def sd_kernel(Nt, p, m, var, vars):
    """f(lam) = int_{-1}^oo e^{-Nt h lam} (1-h)^p (1+h)^m dh as a RatExp."""
    lam = LaurentPoly.var(vars, var)
    num = LaurentPoly(vars)
    # substitute u = 1+h: e^{Nt lam} int_0^oo e^{-Nt u lam} (2-u)^p u^m du
    for l in range(p + 1):
        c = comb(p, l) * Fraction(2) ** (p - l) * (-1) ** l * factorial(m + l)
        num = num + (Fraction(Nt) * lam) ** (-(m + l + 1)) * c
    rates = [Fraction(Nt) if v == var else Fraction(0) for v in vars]
    return RatExpFunction.exp_times(vars, rates, RationalFunction(num))


def sd_partition(Nt, p, m, n):
    """Z[lam] = det[d^(i-1) f(lam_j)] / Delta(lam) on n variables."""
    vars = tuple(f"l{j}" for j in range(1, n + 1))
    cols = []
    for j in range(n):
        f = sd_kernel(Nt, p, m, vars[j], vars)
        col = [f]
        for _ in range(1, n):
            col.append(col[-1].diff(vars[j]))
        cols.append(col)
    M = [[cols[j][i] for j in range(n)] for i in range(n)]
    num = det(M)
    vdm = LaurentPoly.const(vars, 1)
    for i in range(n):
        for j in range(i + 1, n):
            vdm = vdm * (LaurentPoly.var(vars, vars[j]) - LaurentPoly.var(vars, vars[i]))
    Z = RatExpFunction(vars, {k: RationalFunction(R.num, R.den * vdm) for k, R in num.terms.items()})
    return Z, vars


def sd_operator(Z: RatExpFunction, vars, i, Nt, at, bt):
    """Apply the lambda-space Schwinger-Dyson operator for index i."""
    Nt = Fraction(Nt)
    li = vars[i]
    lam = lambda v: LaurentPoly.var(vars, v)
    dZ = Z.diff(li)
    out = Z.diff(li).diff(li) * RationalFunction(lam(li) * (-1 / Nt ** 2))
    for j, lj in enumerate(vars):
        if j == i:
            continue
        w = RationalFunction(lam(lj), lam(lj) - lam(li)) * (-1 / Nt ** 2)
        out = out + (Z.diff(lj) - dZ) * w
    out = out + dZ * ((Fraction(at) + Fraction(bt) - 2) / Nt)
    out = out + Z * RationalFunction(LaurentPoly.const(vars, Fraction(bt) - Fraction(at)) + lam(li))
    return out


def sd_equation_check(lambdas_tilde, params):
    """Exact residuals of the n Schwinger-Dyson equations at rational points.

    Returns a list (one per equation) of {rate: rational} residual parts;
    every part must vanish.
    """
    N = params.N
    n = params.size("alpha")
    if len(lambdas_tilde) != n:
        raise KernelError(f"need alpha*N = {n} points, got {len(lambdas_tilde)}")
    lt = [Fraction(x) for x in lambdas_tilde]
    if len(set(lt)) != n:
        raise KernelError("coincident lambda-tilde points")
    Nt = params.alpha * N
    at = params.beta / params.alpha
    bt = 1 - params.gamma / params.alpha
    p, m = -Nt * at, -Nt * bt
    if p.denominator != 1 or m.denominator != 1 or p < 0 or m < 0:
        raise KernelError("non-integer exponents: Z is not an exact rational-exponential function")
    Z, vars = sd_partition(Nt, int(p), int(m), n)
    vals = dict(zip(vars, lt))
    return [sd_operator(Z, vars, i, Nt, at, bt).evaluate_parts(**vals) for i in range(n)]
