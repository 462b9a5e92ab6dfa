"""One-cut spectral curve of the log-potential one-matrix model.

Conventions.  The cut [b, a] carries a fraction m = min(beta, gamma) of
eigenvalues, the log charge is q = |beta - gamma| (beta + gamma = 2m + q) and

    U'(x) = sum_j u_j x^j,   u_j = delta_{j0} - t_{j+1},
    W'(x) = U'(x) - q/x,     S(x) = sqrt((x-a)(x-b)) ~ x at infinity.

Expansions at large x use the coefficient families

    sigma_j : 1/S   = sum_j sigma_j x^(-1-j)
    s_i     : S     = x sum_i s_i x^(-i)

and kappa = sum_j u_j sigma_j = [x^-1] U'/S.  The branch points solve

    kappa^2 ab = q^2          (kappa > 0),
    sum_j u_j sigma_{j+1} = beta + gamma,

and at q = 0 the cut touches the hard edge: b = 0 and only the second
equation is imposed.  y(x) = (sum_{n>=-1} p_n x^n) S(x) with
p_n = sum_j u_j sigma_{j-1-n}; the planar resolvent is (W' - y)/2 and
dF0/dt_r = [x^(-r-1)] (-y/2) / r.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
import mpmath

from .rings import DEFAULT_PRECISION_BITS, exact_sqrt
from .series import Space, TruncatedSeries, newton_solve, time_space

log = logging.getLogger(__name__)


class CurveError(ValueError):
    pass


def set_precision(bits=DEFAULT_PRECISION_BITS):
    """BigFloat work shares the global mpmath context; raise it if needed."""
    if mpmath.mp.prec < bits:
        mpmath.mp.prec = bits


def _poch_over_fact(p: Fraction, n: int) -> Fraction:
    r = Fraction(1)
    for i in range(n):
        r = r * (p + i) / (i + 1)
    return r


class _Powers:
    """Cached powers of a and b (numbers or series)."""

    def __init__(self, a, b, one):
        self.a, self.b, self.one = a, b, one
        self._a = [one]
        self._b = [one]

    def ap(self, i):
        while len(self._a) <= i:
            self._a.append(self._a[-1] * self.a)
        return self._a[i]

    def bp(self, i):
        while len(self._b) <= i:
            self._b.append(self._b[-1] * self.b)
        return self._b[i]

    def family(self, n, p, q):
        """[z^n] (1 - a z)^(-p) (1 - b z)^(-q)."""
        tot = None
        for i in range(n + 1):
            c = _poch_over_fact(p, i) * _poch_over_fact(q, n - i)
            if c == 0:
                continue
            term = self.ap(i) * self.bp(n - i) * c if not isinstance(self.a, TruncatedSeries) \
                else (self.ap(i) * self.bp(n - i)).scale(c)
            tot = term if tot is None else tot + term
        return tot if tot is not None else self.one * 0


HALF = Fraction(1, 2)


def sigma(pw: _Powers, j):
    return pw.family(j, HALF, HALF)


def s_coeff(pw: _Powers, i):
    return pw.family(i, -HALF, -HALF)


def residue_expansion(f, a, b, k=0):
    """[w^-1] of w^k f(w)/sqrt((w-a)(w-b)) at large w.

    ``f`` maps powers j (any integer) to coefficients; the pole part is
    already relative to infinity, so terms with j + k < 0 drop out.
    """
    if isinstance(f, (list, tuple)):
        f = dict(enumerate(f))
    one = _one_like(a)
    pw = _Powers(a, b, one)
    tot = one * 0
    for j, c in f.items():
        if j + k < 0 or c == 0:
            continue
        tot = tot + _mul(sigma(pw, j + k), c)
    return tot


def _one_like(x):
    if isinstance(x, TruncatedSeries):
        return TruncatedSeries.const(x.space, 1)
    if isinstance(x, (int, Fraction)):
        return Fraction(1)
    return mpmath.mpf(1)


def _mul(x, c):
    if isinstance(x, TruncatedSeries):
        return x * c if isinstance(c, TruncatedSeries) else x.scale(c)
    if isinstance(c, TruncatedSeries):
        return c.scale(x)
    return x * c


@dataclass
class SpectralCurveData:
    beta: Fraction
    gamma: Fraction
    D: int
    a: TruncatedSeries
    b: TruncatedSeries | None      # None at the hard edge (b = 0)
    u: list                         # u_0..u_{D-1} as series
    ring: str
    seeds: tuple

    @property
    def q(self):
        return abs(self.beta - self.gamma)

    @property
    def hard_edge(self):
        return self.b is None

    @property
    def space(self):
        return self.a.space

    def b_series(self):
        return self.b if self.b is not None else TruncatedSeries.zero(self.space)

    def powers(self):
        return _Powers(self.a, self.b_series(), TruncatedSeries.const(self.space, 1))

    def kappa(self):
        pw = self.powers()
        return sum((self.u[j] * sigma(pw, j) for j in range(len(self.u))),
                   TruncatedSeries.zero(self.space))


def potential_coefficients(space: Space, D: int):
    """u_j = delta_{j0} - t_{j+1}, j = 0..D-1 (Times mode)."""
    return [TruncatedSeries.const(space, 1 if j == 0 else 0) - TruncatedSeries.var(space, f"t{j + 1}")
            for j in range(D)]


def t0_branch_points(beta, gamma, ring="exact"):
    """(a0, b0) = ((sqrt(beta) +- sqrt(gamma))^2)."""
    beta, gamma = Fraction(beta), Fraction(gamma)
    if beta <= 0 or gamma <= 0:
        raise CurveError("needs beta, gamma > 0 for a real one-cut seed")
    if ring == "exact":
        try:
            r = exact_sqrt(beta * gamma)
        except ValueError:
            raise CurveError(f"sqrt(beta*gamma) = sqrt({beta * gamma}) is irrational; use the float ring") from None
    else:
        r = mpmath.sqrt(mpmath.mpf(beta.numerator) / beta.denominator * gamma.numerator / gamma.denominator)
        beta = mpmath.mpf(beta.numerator) / beta.denominator
        gamma = mpmath.mpf(gamma.numerator) / gamma.denominator
    return beta + gamma + 2 * r, beta + gamma - 2 * r


def _residuals(unknowns, u, bg, q, hard):
    a = unknowns[0]
    b = unknowns[1] if not hard else a * 0
    space = a.space
    pw = _Powers(a, b, TruncatedSeries.const(space, 1))
    D = len(u)
    e2 = sum((u[j] * sigma(pw, j + 1) for j in range(D)), TruncatedSeries.zero(space)) - bg
    if hard:
        return [e2]
    kap = sum((u[j] * sigma(pw, j) for j in range(D)), TruncatedSeries.zero(space))
    e1 = kap * kap * a * b - q * q
    return [e1, e2]


def solve_branch_points(beta, gamma, D, ring="auto", precision_bits=DEFAULT_PRECISION_BITS):
    """Series a(t), b(t) solving the two branch-point constraints to weight D."""
    beta, gamma = Fraction(beta), Fraction(gamma)
    if ring == "auto":
        try:
            exact_sqrt(beta * gamma)
            ring = "exact"
        except ValueError:
            ring = "float"
    if ring == "float":
        set_precision(precision_bits)
    a0, b0 = t0_branch_points(beta, gamma, ring)
    if not a0 > b0:
        raise CurveError("no admissible seed with a(0) > b(0)")
    q = abs(beta - gamma)
    hard = q == 0
    if not hard and not b0 > 0:
        raise CurveError("seed touches the hard edge while a log term is present")
    space = time_space(D)
    u = potential_coefficients(space, D)
    if ring == "float":
        u = [s.map_coeffs(lambda c: mpmath.mpf(c.numerator) / c.denominator) for s in u]
        bg = mpmath.mpf(beta.numerator) / beta.denominator + mpmath.mpf(gamma.numerator) / gamma.denominator
        qq = mpmath.mpf(q.numerator) / q.denominator
        tol = mpmath.mpf(2) ** (-(precision_bits - 24))
    else:
        bg, qq, tol = beta + gamma, q, None
    seeds = [a0] if hard else [a0, b0]
    sol = newton_solve(lambda x: _residuals(x, u, bg, qq, hard), seeds, space, tol=tol)
    return SpectralCurveData(beta, gamma, D, sol[0], None if hard else sol[1], u, ring, tuple(seeds))


def constraint_residuals(curve: SpectralCurveData):
    q = curve.q
    bg = curve.beta + curve.gamma
    if curve.ring == "float":
        q = mpmath.mpf(q.numerator) / q.denominator
        bg = mpmath.mpf(bg.numerator) / bg.denominator
    unk = [curve.a] if curve.hard_edge else [curve.a, curve.b]
    return _residuals(unk, curve.u, bg, q, curve.hard_edge)


@dataclass
class YCurve:
    """y(x) = (sum_{n >= -1} p[n+1] x^n) * S(x)."""
    curve: SpectralCurveData
    p: list

    def expansion(self, kmin):
        """Large-x coefficients [x^k] y for k from deg down to kmin."""
        pw = self.curve.powers()
        out = {}
        top = len(self.p) - 1  # highest n
        for k in range(kmin, top + 2):
            tot = TruncatedSeries.zero(self.curve.space)
            for idx, pn in enumerate(self.p):
                n = idx - 1
                i = n + 1 - k
                if i < 0:
                    continue
                tot = tot + pn * s_coeff(pw, i)
            out[k] = tot
        return out

    def bracket_at(self, x, tvals=None):
        """Numeric value of the polynomial-plus-pole bracket at x."""
        return sum(_eval(pn, tvals) * x ** (idx - 1) for idx, pn in enumerate(self.p))

    def __call__(self, x, tvals=None):
        a = _eval(self.curve.a, tvals)
        b = _eval(self.curve.b_series(), tvals)
        S = mpmath.sqrt((x - a) * (x - b)) if x != a else 0
        return self.bracket_at(x, tvals) * S


def _eval(s, tvals):
    if tvals is None:
        c = s.constant()
    else:
        c = s.evaluate(**tvals)
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return c


def y_of_x(curve: SpectralCurveData) -> YCurve:
    pw = curve.powers()
    D = len(curve.u)
    p = []
    for n in range(-1, D - 1):
        tot = TruncatedSeries.zero(curve.space)
        for j in range(D):
            if j - 1 - n >= 0:
                tot = tot + curve.u[j] * sigma(pw, j - 1 - n)
        p.append(tot)
    return YCurve(curve, p)


def planar_moments(curve: SpectralCurveData, r_max):
    """mu_k = [x^(-k-1)](-y/2) = <tr X^k>_0 / N, k = 1..r_max."""
    if r_max > curve.D:
        raise CurveError(f"r_max={r_max} beyond truncation D={curve.D}")
    Y = y_of_x(curve)
    pw = curve.powers()
    out = []
    for k in range(1, r_max + 1):
        tot = TruncatedSeries.zero(curve.space)
        for idx, pn in enumerate(Y.p):
            n = idx - 1
            tot = tot + pn * s_coeff(pw, n + k + 2)
        out.append(tot.scale(Fraction(-1, 2)))
    return out


def genus0_derivatives(curve: SpectralCurveData, r_max):
    """[dF0/dt_r for r = 1..r_max], each valid to weight D - r."""
    mus = planar_moments(curve, r_max)
    return [mu.truncate(curve.D - r).scale(Fraction(1, r)) for r, mu in enumerate(mus, start=1)]


def f0_via_contour(curve: SpectralCurveData):
    """F0(t) - F0(0) rebuilt from the planar one-point functions.

    Uses Euler's relation on weight components, w F0_w = sum_r r t_r
    (dF0/dt_r)_{w-r}; the derivatives themselves are contour residues of y.
    """
    D = curve.D
    ders = genus0_derivatives(curve, D)
    sp = curve.space
    comps = {}
    for r, dr in enumerate(ders, start=1):
        tr = TruncatedSeries.var(sp, f"t{r}")
        prod = tr * dr.extend(D)
        for k, v in prod.terms.items():
            comps[k] = comps.get(k, 0) + v * r
    out = {}
    for k, v in comps.items():
        w = sp.weight_of(k)
        if w and v != 0:
            out[k] = v * Fraction(1, w)
    return TruncatedSeries(sp, out)


def moments(curve: SpectralCurveData, r):
    """(M_r, J_r) in Times form:
    M_r = res[U'(w) (w-a)^(-r-1/2) (w-b)^(-1/2)] + (-1)^(r+1) kappa a^-r,
    J_r likewise with a and b swapped in the powers and b^-r."""
    if r < 1:
        raise CurveError("moments need r >= 1")
    if curve.hard_edge:
        raise CurveError("J_r is singular at the hard edge; use f1 directly")
    pw = curve.powers()
    kap = curve.kappa()
    sign = 1 if r % 2 else -1
    D = len(curve.u)
    rp = Fraction(r) + HALF
    M = TruncatedSeries.zero(curve.space)
    J = TruncatedSeries.zero(curve.space)
    for j in range(r, D):
        M = M + curve.u[j] * pw.family(j - r, rp, HALF)
        J = J + curve.u[j] * pw.family(j - r, HALF, rp)
    M = M + (kap * curve.a.inverse() ** r).scale(sign)
    J = J + (kap * curve.b.inverse() ** r).scale(sign)
    return M, J


def _log_ratio(s):
    c = s.constant()
    if c == 0:
        raise CurveError("vanishing moment: curve degenerates")
    return s.scale(1 / c).log()


def f1(curve: SpectralCurveData):
    """F1(t) - F1(0) = -1/24 log[M1 J1 d^4] ratio to t = 0, d = a - b.

    At the hard edge the q -> 0 limit replaces J1 by kappa^3 a (since then
    kappa/b ~ kappa^3 a / q^2 dominates) and d by a."""
    if curve.hard_edge:
        pw = curve.powers()
        kap = curve.kappa()
        M1 = kap * curve.a.inverse()
        for j in range(1, len(curve.u)):
            M1 = M1 + curve.u[j] * pw.family(j - 1, Fraction(3, 2), HALF)
        J1 = kap * kap * kap * curve.a
        d = curve.a
    else:
        M1, J1 = moments(curve, 1)
        d = curve.a - curve.b
    if d.constant() == 0:
        raise CurveError("degenerate cut a = b")
    tot = _log_ratio(M1) + _log_ratio(J1) + _log_ratio(d).scale(4)
    return tot.scale(Fraction(-1, 24))


def f1_at_zero(curve: SpectralCurveData):
    """Numeric F1(0) = -1/24 log(M1 J1 d^4) at t = 0 (soft edge only)."""
    M1, J1 = moments(curve, 1)
    d = curve.a.constant() - curve.b.constant()
    v = M1.constant() * J1.constant() * d ** 4
    v = mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v
    return -mpmath.log(v) / 24


# --- Miwa form: poles and closed genus-zero formula ---

@dataclass
class MiwaCurve:
    """Branch points for a finite set of poles, in the variables where the
    poles are lambda-tilde and the potential is -2 alpha N x + ... ."""
    alpha: object
    beta: object
    gamma: object
    N: object
    lambdas: list
    a: object
    b: object

    @property
    def q(self):
        return abs(self.beta - self.gamma)

    def g(self, l):
        return mpmath.sqrt((l - self.a) * (l - self.b))


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def solve_miwa(alpha, beta, gamma, N, lambdas_tilde, precision_bits=DEFAULT_PRECISION_BITS, seed=None):
    """Solve the two constraints in lambda-tilde form (charge |gamma - beta|):

        -2 alpha N + sum 1/g(l_i) + q N / sqrt(ab) = 0,
        (gamma + beta - alpha) N - alpha N (a + b) + sum l_i/g(l_i) = 0.
    """
    set_precision(precision_bits)
    al, be, ga, N = (_mp(x) for x in (alpha, beta, gamma, N))
    lams = [_mp(x) for x in lambdas_tilde]
    q = abs(be - ga)
    if q == 0:
        raise CurveError("Miwa closed form needs beta != gamma (soft edge)")
    if seed is None:
        seed = ((mpmath.sqrt(be) + mpmath.sqrt(ga)) ** 2 / (2 * al),
                (mpmath.sqrt(be) - mpmath.sqrt(ga)) ** 2 / (2 * al))

    def F(a, b):
        g = [mpmath.sqrt((l - a) * (l - b)) for l in lams]
        return [-2 * al * N + sum(1 / x for x in g) + q * N / mpmath.sqrt(a * b),
                (ga + be - al) * N - al * N * (a + b) + sum(l / x for l, x in zip(lams, g))]

    if any(l <= seed[0] for l in lams):
        raise CurveError("lambda-tilde inside or below the cut")
    try:
        a, b = mpmath.findroot(F, seed, tol=mpmath.mpf(2) ** (-precision_bits + 16))
    except (ValueError, ZeroDivisionError) as e:
        raise CurveError(f"Miwa solve failed: {e}") from None
    if any(isinstance(x, mpmath.mpc) and x.imag != 0 for x in (a, b)):
        raise CurveError("Miwa solve left the real one-cut regime")
    a, b = mpmath.re(a), mpmath.re(b)
    if not (a > b > 0):
        raise CurveError("Miwa solve left the one-cut soft-edge regime")
    if any(l <= a for l in lams):
        raise CurveError("lambda-tilde inside or below the cut")
    return MiwaCurve(al, be, ga, N, lams, a, b)


def moments_miwa(mc: MiwaCurve, r):
    """(M_r, J_r) from the pole sums, in the normalization of moments()
    (x = 2 alpha lambda-tilde, weight 1/N per pole)."""
    two_a = 2 * mc.alpha
    A, B = two_a * mc.a, two_a * mc.b
    w = 1 / mc.N
    q = mc.q
    kap = q / mpmath.sqrt(A * B)
    sign = 1 if r % 2 else -1
    M = J = mpmath.mpf(0)
    for l in mc.lambdas:
        L = two_a * l
        M -= w / ((L - A) ** (r + HALF_MP) * (L - B) ** HALF_MP)
        J -= w / ((L - A) ** HALF_MP * (L - B) ** (r + HALF_MP))
    return M + sign * kap / A ** r, J + sign * kap / B ** r


HALF_MP = mpmath.mpf(1) / 2


def moments_times_numeric(mc: MiwaCurve, r, order=None):
    """Times-form moments evaluated at the Miwa times t_k = (1/N) sum L^-k
    with the Miwa branch points, U' truncated at ``order``."""
    two_a = 2 * mc.alpha
    A, B = two_a * mc.a, two_a * mc.b
    Ls = [two_a * l for l in mc.lambdas]
    w = 1 / mc.N
    if order is None:
        ratio = A / min(Ls)
        order = int(mpmath.ceil(mpmath.mp.prec * mpmath.log(2) / -mpmath.log(ratio))) + 5
    u = [(1 if j == 0 else 0) - w * sum(L ** -(j + 1) for L in Ls) for j in range(order)]
    pw = _Powers(A, B, mpmath.mpf(1))
    kap = sum(u[j] * sigma(pw, j) for j in range(order))
    sign = 1 if r % 2 else -1
    rp = Fraction(r) + HALF
    M = sum(u[j] * pw.family(j - r, rp, HALF) for j in range(r, order))
    J = sum(u[j] * pw.family(j - r, HALF, rp) for j in range(r, order))
    return M + sign * kap / A ** r, J + sign * kap / B ** r


F0_FORMS = ("stationary", "uncorrected")


def _f0_parts(mc: MiwaCurve, lams, a, b, form):
    """Closed F = N^2 F0 before normalization, in both forms.

    "uncorrected" differs in five places: per-point linear term (g - l)
    without alpha, log-ratio coefficient q (alpha-beta-gamma), (a+b)^2 for
    (a-b)^2, (a+b)/2 for alpha(a+b)/2, and a sign-flipped R (taken as log|R|).
    Only the stationary form has dF/da = dF/db = 0 on the branch-point
    equations.
    """
    raw = form == "uncorrected"
    al, be, ga, N = mc.alpha, mc.beta, mc.gamma, mc.N
    q = mc.q
    s = a + b
    r = mpmath.sqrt(a * b)
    lg = (lambda x: mpmath.re(mpmath.log(x))) if raw else mpmath.log
    ratio = lg((s - 2 * r) / (s + 2 * r))
    if raw:
        H = N ** 2 * ((be ** 2 + ga ** 2) / 4 * lg((a - b) ** 2) + (al - be - ga) * (q * ratio + s / 2)
                      + al ** 2 / 8 * s ** 2 + al * q * r - q ** 2 / 4 * lg(a * b))
    else:
        H = N ** 2 * ((be ** 2 + ga ** 2) / 4 * lg((a - b) ** 2) + (al - be - ga) * (q / 4 * ratio + al * s / 2)
                      + al ** 2 / 8 * (a - b) ** 2 + al * q * r - q ** 2 / 4 * lg(a * b))
    lin = 1 if raw else al
    g = lambda l: mpmath.sqrt((l - a) * (l - b))
    per = mpmath.mpf(0)
    for l in lams:
        G = g(l)
        R = (l * s / (2 * r) - r - G) / (G + l * s / (2 * r) - r)
        if not R > 0:
            raise CurveError("log argument not positive in the closed F0")
        per += N * ((be + ga) / 2 * lg(l) + lin * (G - l)
                    + (al - be - ga) / 2 * lg(l - s / 2 + G) - q / 4 * lg(R))
    pair = mpmath.mpf(0)
    for l1 in lams:
        for l2 in lams:
            pair -= lg(g(l1) * g(l2) + l1 * l2 - (l1 + l2) / 2 * s + a * b) / 4
    return H + per + pair


def _f0_infinity(mc: MiwaCurve, n, form):
    """Limit of the closed form when every lambda-tilde goes to infinity.

    Then a, b return to their t = 0 values, g - l -> -s/2, R -> the ratio
    (s - 2r)/(s + 2r), and the log l terms cancel because n = alpha N."""
    al, be, ga, N = mc.alpha, mc.beta, mc.gamma, mc.N
    a0 = (mpmath.sqrt(be) + mpmath.sqrt(ga)) ** 2 / (2 * al)
    b0 = (mpmath.sqrt(be) - mpmath.sqrt(ga)) ** 2 / (2 * al)
    s, r = a0 + b0, mpmath.sqrt(a0 * b0)
    lin = 1 if form == "uncorrected" else al
    H = _f0_parts(MiwaCurve(al, be, ga, N, [], a0, b0), [], a0, b0, form)
    per = n * N * (-lin * s / 2 + (al - be - ga) / 2 * mpmath.log(2)
                   - mc.q / 4 * mpmath.log((s - 2 * r) / (s + 2 * r)))
    pair = -mpmath.mpf(n * n) / 4 * mpmath.log(2)
    return H + per + pair


def f0_closed(lambdas_tilde, alpha, beta, gamma, N=1, curve: MiwaCurve | None = None,
              form="stationary", precision_bits=DEFAULT_PRECISION_BITS):
    """Genus-zero free energy F0 = F/N^2 from the closed formula in the
    lambda-tilde variables, normalized to vanish as all lambda-tilde -> oo.
    ``form`` is "stationary" (default) or "uncorrected", see _f0_parts."""
    if form not in F0_FORMS:
        raise CurveError(f"form must be one of {F0_FORMS}")
    if curve is None:
        curve = solve_miwa(alpha, beta, gamma, N, lambdas_tilde, precision_bits)
    lams = curve.lambdas
    n = len(lams)
    expect = _mp(alpha) * _mp(N)
    if n != expect:
        raise CurveError(f"{n} lambda-tilde values given but alpha*N = {expect}")
    val = _f0_parts(curve, lams, curve.a, curve.b, form) - _f0_infinity(curve, n, form)
    return val / curve.N ** 2


def f0_stationarity(curve: MiwaCurve, form="stationary"):
    """(dF/da, dF/db) of the closed form at fixed lambda-tilde."""
    fa = mpmath.diff(lambda x: _f0_parts(curve, curve.lambdas, x, curve.b, form), curve.a)
    fb = mpmath.diff(lambda x: _f0_parts(curve, curve.lambdas, curve.a, x, form), curve.b)
    return fa, fb


@dataclass
class PotentialSpec:
    """Times mode: U' = 1 - sum t_{j+1} x^j to weight D.  Miwa mode: poles
    lambda-tilde with log charge |gamma - beta| N and linear part -2 alpha N x."""
    beta: Fraction
    gamma: Fraction
    mode: str = "times"
    D: int = 6
    lambdas: tuple = ()
    alpha: Fraction = Fraction(1)
    N: Fraction = Fraction(1)

    def __post_init__(self):
        if self.mode not in ("times", "miwa"):
            raise CurveError(f"unknown potential mode {self.mode!r}")
        if self.mode == "miwa" and any(l == 0 for l in self.lambdas):
            raise CurveError("Miwa poles must be nonzero")


def solve(potential: PotentialSpec, ring="auto", precision_bits=DEFAULT_PRECISION_BITS):
    if potential.mode == "times":
        return solve_branch_points(potential.beta, potential.gamma, potential.D, ring, precision_bits)
    return solve_miwa(potential.alpha, potential.beta, potential.gamma, potential.N,
                      potential.lambdas, precision_bits)


def report(curve: SpectralCurveData, oracle=None):
    """JSON-ready report; ``oracle`` is an optional GenusSeries evaluated at
    (beta, gamma, N=1) for per-monomial deltas."""
    out = {
        "params": {"beta": str(curve.beta), "gamma": str(curve.gamma), "D": curve.D, "ring": curve.ring},
        "a": curve.a.to_json(),
        "b": curve.b_series().to_json(),
        "residual_norms": [_nstr(r.max_abs()) for r in constraint_residuals(curve)],
        "F0_series": f0_via_contour(curve).to_json(),
        "F1_series": f1(curve).to_json(),
    }
    if oracle is not None:
        comp = {}
        for g, ours in ((0, f0_via_contour(curve)), (1, f1(curve))):
            diff = ours - _as_ring(oracle[g], curve.ring)
            comp[f"genus{g}"] = {_mono(curve.space, k): _nstr(abs(v)) for k, v in diff.terms.items()}
            comp[f"genus{g}_max_abs_delta"] = _nstr(diff.max_abs())
        out["comparison_vs_oracle"] = comp
    return out


def _as_ring(s, ring):
    if ring == "exact":
        return s
    return s.map_coeffs(lambda c: mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else c)


def _mono(space, k):
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(space.vars, k) if e) or "1"


def _nstr(x):
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return mpmath.nstr(x, 20)
