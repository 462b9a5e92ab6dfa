"""Brute-force generating functions of dessins (Belyi fat graphs).

For every degree d we fix sigma0 on a representative of each conjugacy
class (weight = class size) and run sigma1 through all of S_d with numpy.
A pair contributes

    N^(2-2g) beta^c(sigma1) gamma^c(sigma0) prod_r t_r^m_r / d!

where m_r counts r-cycles of sigma_inf.  In two-profile mode the cycles of
sigma1 are recorded as tt_s monomials instead of powers of beta.
"""
from __future__ import annotations

import csv
import enum
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .perm import DEFAULT_DEGREE_CAP, conjugacy_classes, representative
from .rings import PARAMS, LaurentPoly
from .series import GenusSeries, Space, TruncatedSeries

log = logging.getLogger(__name__)

TWO_PROFILE_CAP = 7


class CapError(ValueError):
    pass


class CountFilter(enum.Enum):
    ALL = "all"
    CLEAN_STRICT = "clean-strict"
    CLEAN_LOOSE = "clean-loose"
    TWO_PROFILE = "two-profile"

    @classmethod
    def parse(cls, s):
        if isinstance(s, cls):
            return s
        return cls(str(s).lower().replace("_", "-"))


@dataclass(frozen=True)
class ModelParams:
    N: object = 1
    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(1)
    gamma: Fraction = Fraction(1)

    def __post_init__(self):
        for f in ("alpha", "beta", "gamma"):
            object.__setattr__(self, f, Fraction(getattr(self, f)))
        if not isinstance(self.N, LaurentPoly):
            object.__setattr__(self, "N", Fraction(self.N))

    def size(self, which) -> int:
        v = getattr(self, which) * self.N
        if v.denominator != 1 or v < 0:
            raise ValueError(f"{which}*N = {v} is not a nonnegative integer")
        return int(v)


def series_space(d_max, two_profile=False):
    names = tuple(f"t{r}" for r in range(1, d_max + 1))
    weights = tuple(range(1, d_max + 1))
    if two_profile:
        names += tuple(f"tt{s}" for s in range(1, d_max + 1))
        weights += tuple(range(1, d_max + 1))
        return Space(names, weights, 2 * d_max)
    return Space(names, weights, d_max)


def _all_perms(d):
    return np.array(list(itertools.permutations(range(d))), dtype=np.int8).reshape(-1, d)


def _cycle_lengths(P):
    """Per-row, per-element cycle length of the permutation rows of P."""
    n, d = P.shape
    rows = np.arange(n)[:, None]
    start = np.broadcast_to(np.arange(d), (n, d))
    cur = P.copy()
    length = np.zeros((n, d), dtype=np.int8)
    for k in range(1, d + 1):
        hit = (cur == start) & (length == 0)
        length[hit] = k
        cur = P[rows, cur]
    return length


def _cycle_counts(P):
    """Array (n, d+1): entry [i, r] = number of r-cycles of row i."""
    L = _cycle_lengths(P)
    d = P.shape[1]
    out = np.zeros((P.shape[0], max(d, 2) + 1), dtype=np.int16)
    for r in range(1, d + 1):
        out[:, r] = (L == r).sum(axis=1) // r
    return out


def _transitive(s0, P):
    """Rows of P (as sigma1) generating a transitive group with s0."""
    n, d = P.shape
    rows = np.arange(n)[:, None]
    reach = np.zeros((n, d), dtype=bool)
    reach[:, 0] = True
    for _ in range(d):
        new = reach.copy()
        new[:, s0] |= reach
        img = np.zeros_like(reach)
        img[rows, P] = reach
        new |= img
        if (new == reach).all():
            break
        reach = new
    return reach.all(axis=1)


class _Accumulator:
    def __init__(self):
        self.data = {}

    def add(self, key, w):
        self.data[key] = self.data.get(key, 0) + w


def _enumerate_degree(d, flt: CountFilter, connected: bool):
    """Yield (chi, c0, c1_or_type, sigma_inf counts, weight) aggregated."""
    P = _all_perms(d)
    counts1 = _cycle_counts(P)
    c1 = counts1.sum(axis=1)
    if flt is CountFilter.CLEAN_STRICT:
        mask = counts1[:, 2] * 2 == d
    elif flt is CountFilter.CLEAN_LOOSE:
        mask = counts1[:, 1] + 2 * counts1[:, 2] == d
    else:
        mask = np.ones(len(P), dtype=bool)
    P, counts1, c1 = P[mask], counts1[mask], c1[mask]
    if len(P) == 0:
        return {}
    acc = {}
    dfact = factorial(d)
    for parts, size in conjugacy_classes(d):
        s0 = np.array([x - 1 for x in representative(parts).images], dtype=np.int8)
        c0 = len(parts)
        prod_ = s0[P]  # (sigma0 o sigma1)(i) = sigma0(sigma1(i))
        cinf = _cycle_counts(prod_)
        ninf = cinf.sum(axis=1)
        keep = _transitive(s0, P) if connected else np.ones(len(P), dtype=bool)
        chi = c0 + c1 + ninf - d
        if flt is CountFilter.TWO_PROFILE:
            second = counts1[:, 1:d + 1]
        else:
            second = c1[:, None]
        key = np.concatenate([chi[:, None], second, cinf[:, 1:d + 1]], axis=1)[keep]
        if len(key) == 0:
            continue
        uniq, mult = np.unique(key, axis=0, return_counts=True)
        for row, m in zip(uniq, mult):
            k = (c0,) + tuple(int(x) for x in row)
            acc[k] = acc.get(k, 0) + Fraction(int(m) * size, dfact)
    return acc


def _check_cap(d_max, flt, cap):
    lim = cap if cap is not None else (TWO_PROFILE_CAP if flt is CountFilter.TWO_PROFILE else DEFAULT_DEGREE_CAP)
    if d_max > lim:
        raise CapError(f"d_max={d_max} exceeds the degree cap {lim} for filter {flt.value}; "
                       f"pass a larger cap explicitly if you really want this")
    if d_max < 0:
        raise CapError("d_max must be nonnegative")


def _monomial(space, d, flt, key):
    c0, chi = key[0], key[1]
    nd = space.vars.index("t1")
    e = [0] * len(space.vars)
    if flt is CountFilter.TWO_PROFILE:
        prof = key[2:2 + d]
        inf = key[2 + d:]
        for s, m in enumerate(prof, start=1):
            e[space.vars.index(f"tt{s}")] = int(m)
        coeff = LaurentPoly.var(PARAMS, "gamma", c0)
    else:
        c1 = key[2]
        inf = key[3:]
        coeff = LaurentPoly(PARAMS, {(c1, c0, 0): 1})
    for r, m in enumerate(inf, start=1):
        if m:
            e[nd + r - 1] = int(m)
    return tuple(e), coeff, chi


def connected_gf(d_max: int, flt=CountFilter.ALL, cap=None) -> GenusSeries:
    """Connected dessins by genus; coefficients in (beta, gamma)."""
    flt = CountFilter.parse(flt)
    _check_cap(d_max, flt, cap)
    space = series_space(d_max, flt is CountFilter.TWO_PROFILE)
    buckets: dict[int, dict] = {}
    for d in range(1, d_max + 1):
        for key, w in _enumerate_degree(d, flt, True).items():
            e, coeff, chi = _monomial(space, d, flt, key)
            if chi % 2 or chi > 2:
                raise ArithmeticError(f"odd or oversized Euler characteristic {chi}")
            g = (2 - chi) // 2
            b = buckets.setdefault(g, {})
            b[e] = b.get(e, LaurentPoly(PARAMS)) + coeff * w
        log.debug("degree %d done", d)
    return GenusSeries({g: TruncatedSeries(space, b) for g, b in buckets.items()}, space)


def partition_function(d_max: int, flt=CountFilter.ALL, cap=None) -> TruncatedSeries:
    """Sum over all (not necessarily transitive) pairs, N made explicit."""
    flt = CountFilter.parse(flt)
    _check_cap(d_max, flt, cap)
    space = series_space(d_max, flt is CountFilter.TWO_PROFILE)
    terms = {(0,) * len(space.vars): LaurentPoly.const(PARAMS, 1)}
    for d in range(1, d_max + 1):
        for key, w in _enumerate_degree(d, flt, False).items():
            e, coeff, chi = _monomial(space, d, flt, key)
            coeff = coeff * LaurentPoly.var(PARAMS, "N", chi) * w
            terms[e] = terms.get(e, LaurentPoly(PARAMS)) + coeff
    return TruncatedSeries(space, terms)


def exp_connected(gs: GenusSeries) -> TruncatedSeries:
    """Grading-aware exponential: exp(sum_g N^(2-2g) F_g)."""
    return gs.total().exp()


def swap_beta_gamma(gs: GenusSeries) -> GenusSeries:
    return gs.map(lambda s: s.map_coeffs(lambda c: c.swap("beta", "gamma")))


def miwa_times(lambdas, r, scale=1):
    return Fraction(scale) * sum(Fraction(l) ** (2 * r) for l in lambdas)


def evaluate(series, params: ModelParams, lambdas, eps="eps", time_scale=1,
             tt_lambdas=None, keep_t=False):
    """Miwa-substitute t_r <- time_scale * sum (eps*lambda_i)^(2r).

    ``series`` is a GenusSeries (N^(2-2g) restored) or a TruncatedSeries whose
    coefficients are LaurentPoly in (beta, gamma, N).  Returns a series in
    ``eps`` (weight 1) truncated at twice the input weight.  With
    ``tt_lambdas`` the tt_s times are substituted by the same rule; with
    ``keep_t`` the t_r stay formal (two-profile comparisons).
    """
    if isinstance(series, GenusSeries):
        series = series.total()
    space = series.space
    vals = {"beta": params.beta, "gamma": params.gamma, "N": params.N}
    coeff_fn = lambda c: c.evaluate(**vals) if isinstance(c, LaurentPoly) else c
    subst_t = not keep_t
    subst_tt = tt_lambdas is not None
    if not series.is_zero() and subst_t and not lambdas and any(
            e for k in series.terms for e in k):
        raise ValueError("empty lambda list for a nonconstant series")
    # target space
    names, weights = [], []
    tnames = [v for v in space.vars if v.startswith("t") and not v.startswith("tt")]
    ttnames = [v for v in space.vars if v.startswith("tt")]
    D = len(tnames)
    if keep_t:
        names += tnames
        weights += list(range(1, D + 1))
    if not subst_tt:
        names += ttnames
        weights += [int(v[2:]) for v in ttnames]
    names.append(eps)
    weights.append(1)
    if keep_t:
        maxw = 3 * D
    else:
        maxw = 2 * space.max_weight
    target = Space(tuple(names), tuple(weights), maxw)
    e = TruncatedSeries.var(target, eps)
    mapping = {}
    if subst_t:
        for r, v in enumerate(tnames, start=1):
            mapping[v] = (e ** (2 * r)).scale(miwa_times(lambdas, r, time_scale))
    if subst_tt:
        for v in ttnames:
            s = int(v[2:])
            mapping[v] = (e ** (2 * s)).scale(miwa_times(tt_lambdas, s, time_scale))
    return series.compose(target, mapping, coeff_fn)


def export_csv(gs: GenusSeries, path_or_file):
    """Rows: degree, genus, monomial, coefficient polynomial."""
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["degree", "genus", "monomial", "coefficient"])
        sp = gs.space
        rows = []
        for g in gs.genera():
            for k, c in gs[g].terms.items():
                deg = sum(e * int(n.lstrip("t")) for n, e in zip(sp.vars, k) if n.startswith("t") and not n.startswith("tt"))
                mon = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(sp.vars, k) if e)
                rows.append((deg, g, mon, str(c)))
        for row in sorted(rows):
            w.writerow(row)
    finally:
        if own:
            fh.close()
