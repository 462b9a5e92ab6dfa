"""Constraint operators acting on truncated series.

V family: the two-log constraints in lambda-tilde times T_n = (1/n) sum
lambda_tilde^-n, parameters (Nt, at, bt).  L1MM family: the Gaussian
one-matrix constraints in xi-times with d/dxi_0 -> -M and the Gaussian part
carried as a fixed base value of xi_2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .series import Space, TruncatedSeries


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorSpec:
    family: str               # "V" or "L1MM"
    k: int
    Nt: Fraction = Fraction(1)
    at: Fraction = Fraction(0)
    bt: Fraction = Fraction(0)
    M: Fraction = Fraction(1)
    base: tuple = ()          # ((m, value), ...) fixed part of xi_m
    prefix: str = ""

    def __post_init__(self):
        if self.family not in ("V", "L1MM"):
            raise OperatorError(f"unknown family {self.family!r}")
        if self.k < -1:
            raise OperatorError("index must be >= -1")


def tilde_space(D):
    return Space(tuple(f"T{n}" for n in range(1, D + 1)), tuple(range(1, D + 1)), D)


def to_tilde_times(Z: TruncatedSeries, alpha, N=1) -> TruncatedSeries:
    """Rewrite a series in dessin times t_r as a series in T_n.

    With t_r = (1/N) sum |lambda|^(2r) and lambda_tilde = lambda^-2/(2 alpha)
    one has t_r = r T_r / (N (2 alpha)^r), i.e. T_n = N (2 alpha)^n t_n / n.
    """
    alpha, N = Fraction(alpha), Fraction(N)
    D = Z.max_weight
    sp = tilde_space(D)
    names = [v for v in Z.vars if v.startswith("t") and not v.startswith("tt")]
    mapping = {v: TruncatedSeries.var(sp, f"T{int(v[1:])}").scale(
        Fraction(int(v[1:])) / (N * (2 * alpha) ** int(v[1:]))) for v in names}
    return Z.compose(sp, mapping)


def _name(op, n):
    return f"{op.prefix or ('T' if op.family == 'V' else 'xi')}{n}"


def _d(Z, name):
    if name in Z.space.vars:
        return Z.differentiate(name)
    return TruncatedSeries.zero(Z.space)


def _times(Z, name, c=1):
    v = TruncatedSeries.var(Z.space, name, c)
    return v * Z


def certified_weight(op: OperatorSpec, D: int) -> int:
    if op.family == "V":
        return D if op.k == -1 else D - op.k - 1
    mb = max((m for m, v in op.base if v), default=0)
    return min(D, D - op.k - mb) if mb else min(D, D - op.k)


def apply(op: OperatorSpec, Z: TruncatedSeries) -> TruncatedSeries:
    D = Z.max_weight
    out_w = certified_weight(op, D)
    if out_w < 0:
        raise OperatorError(f"index {op.k} incompatible with truncation {D}")
    sp = Z.space.with_max(out_w)

    def fit(s):
        if s.max_weight >= out_w:
            return s.truncate(out_w)
        return s.extend(out_w)

    acc = TruncatedSeries.zero(sp)

    def add(s, c=1):
        nonlocal acc
        acc = acc + fit(s).scale(c) if c != 1 else acc + fit(s)

    k = op.k
    if op.family == "V":
        Nt, at, bt = Fraction(op.Nt), Fraction(op.at), Fraction(op.bt)
        for m in range(1, D + 1):
            if k == -1 and m == 1:
                continue  # cancels against the delta_{k,-1} t_1 d/dt_0 term
            if m + k > D or m + k < 1:
                continue
            d = _d(Z, _name(op, m + k)).extend(D)
            add(_times(d, _name(op, m)), -m)
        for m in range(1, k):
            add(_d(_d(Z, _name(op, m)), _name(op, k - m)), -1)
        if k >= 1:
            add(_d(Z, _name(op, k)), -Nt * (at - bt + 1))
        if k >= 0:
            add(_d(Z, _name(op, k + 1)), 2 * Nt)
        if k == 0:
            add(Z, Nt * Nt * at * (bt - 1))
        return acc
    # L1MM
    M = Fraction(op.M)
    base = dict(op.base)

    def dd(S, a):
        return S.scale(-M) if a == 0 else _d(S, _name(op, a))

    for a in range(0, k + 1):
        add(dd(dd(Z, a), k - a))
    for m in range(1, D + k + 1):
        target = k + m
        if target > D:
            break
        d = dd(Z, target) if target == 0 else _d(Z, _name(op, target))
        if base.get(m):
            add(d, m * Fraction(base[m]))
        if m <= D:
            add(_times(d.extend(D), _name(op, m)), m)
    return acc


def commutator(k, l, Z, **params):
    """([V_k, V_l] - (l-k) V_{k+l}) Z, truncated to the common certified weight."""
    Vk = OperatorSpec("V", k, **params)
    Vl = OperatorSpec("V", l, **params)
    lhs = apply(Vk, apply(Vl, Z)) - _fit(apply(Vl, apply(Vk, Z)), apply(Vk, apply(Vl, Z)).max_weight)
    rhs = apply(OperatorSpec("V", k + l, **params), Z)
    w = min(lhs.max_weight, rhs.max_weight)
    return lhs.truncate(w) - rhs.truncate(w).scale(l - k)


def _fit(s, w):
    return s.truncate(w) if s.max_weight >= w else s.extend(w)


def residual_table(op: OperatorSpec, Z: TruncatedSeries, max_order=None):
    """[(order, max |coeff|)] of op(Z) on certified orders."""
    R = apply(op, Z)
    cert = R.max_weight
    if max_order is not None and max_order > cert:
        raise OperatorError(f"order {max_order} requested beyond certified weight {cert}")
    top = cert if max_order is None else max_order
    rows = []
    for w in range(0, top + 1):
        comp = R.homogeneous(w)
        rows.append((w, comp.max_abs()))
    return rows


def annihilation_check(family, Z: TruncatedSeries, k_max, D=None, k_min=None, **params):
    """Residual table rows (family, k, order, residual) for k in range."""
    if D is not None and D != Z.max_weight:
        Z = _fit(Z, D) if D <= Z.max_weight else None
        if Z is None:
            raise OperatorError("series truncation below requested D")
    if k_min is None:
        k_min = 1 if family == "V" else -1
    rows = []
    for k in range(k_min, k_max + 1):
        op = OperatorSpec(family, k, **params)
        for order, r in residual_table(op, Z):
            rows.append((family, k, order, r))
    return rows
