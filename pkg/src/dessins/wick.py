"""Gaussian one-matrix model by pairings of half-edges, the different-sizes
determinant identity, and a Monte Carlo check of the rectangular-matrix
Jacobian."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod

import numpy as np

from .rings import LaurentPoly
from .series import Space, TruncatedSeries

MAX_HALF_EDGES = 16


class WickError(ValueError):
    pass


@dataclass(frozen=True)
class TraceWord:
    powers: tuple
    M: object = None          # int/Fraction, or None for a formal polynomial in M
    propagator_weight: Fraction = Fraction(1)


@lru_cache(maxsize=None)
def face_distribution(powers: tuple):
    """{faces: number of pairings} for <prod tr Y^k>, powers sorted."""
    K = sum(powers)
    if K % 2:
        return {}
    if K > MAX_HALF_EDGES:
        raise WickError(f"{K} half-edges exceed the cap {MAX_HALF_EDGES}")
    succ = []
    start = 0
    for k in powers:
        for i in range(k):
            succ.append(start + (i + 1) % k)
        start += k
    dist: dict[int, int] = {}
    pair = [-1] * K

    def faces():
        seen = [False] * K
        c = 0
        for h in range(K):
            if not seen[h]:
                c += 1
                x = h
                while not seen[x]:
                    seen[x] = True
                    x = succ[pair[x]]
        return c

    def rec():
        try:
            i = pair.index(-1)
        except ValueError:
            f = faces()
            dist[f] = dist.get(f, 0) + 1
            return
        for j in range(i + 1, K):
            if pair[j] == -1:
                pair[i], pair[j] = j, i
                rec()
                pair[i] = pair[j] = -1

    rec()
    return dist


def pairing_count(powers) -> int:
    return sum(face_distribution(tuple(sorted(powers))).values())


def gaussian_trace_moment(word: TraceWord):
    """<prod tr Y^k_i> for <Y_ab Y_cd> = w delta_ad delta_bc."""
    powers = tuple(sorted(word.powers))
    K = sum(powers)
    w = Fraction(word.propagator_weight)
    if K % 2:
        return 0 if word.M is not None else LaurentPoly(("M",))
    dist = face_distribution(powers)
    scale = w ** (K // 2)
    if word.M is None:
        return LaurentPoly(("M",), {(f,): c * scale for f, c in dist.items()})
    M = Fraction(word.M)
    return sum(c * M ** f for f, c in dist.items()) * scale


def _multi_indices(D, ks):
    """Multisets over ks with sum k*m_k <= D, as tuples of multiplicities."""
    def rec(i, room):
        if i == len(ks):
            yield ()
            return
        k = ks[i]
        for m in range(room // k + 1):
            for rest in rec(i + 1, room - m * k):
                yield (m,) + rest
    yield from rec(0, D)


def onematrix_space(D, prefix="xi"):
    return Space(tuple(f"{prefix}{k}" for k in range(1, D + 1)), tuple(range(1, D + 1)), D)


def onematrix_series(M, D, propagator_weight=1, variables=None, prefix="xi"):
    """<exp(-sum_k xi_k tr Y^k)> in the Gaussian model, as a series in the
    xi_k (weight k); a Gaussian part is required (propagator weight != 0)."""
    w = Fraction(propagator_weight)
    if w == 0:
        raise WickError("missing Gaussian part (zero propagator weight)")
    if D > MAX_HALF_EDGES:
        raise WickError(f"D={D} exceeds the half-edge cap {MAX_HALF_EDGES}")
    space = onematrix_space(D, prefix)
    ks = list(variables) if variables is not None else list(range(1, D + 1))
    terms = {}
    for mult in _multi_indices(D, ks):
        powers = tuple(k for k, m in zip(ks, mult) for _ in range(m))
        if sum(powers) % 2:
            continue
        val = gaussian_trace_moment(TraceWord(powers, M, w))
        if val == 0:
            continue
        c = val * prod(Fraction((-1) ** m, factorial(m)) for m in mult)
        e = [0] * D
        for k, m in zip(ks, mult):
            e[k - 1] = m
        terms[tuple(e)] = c
    return TruncatedSeries(space, terms)


def appell_B(s: int, mu):
    """B_s(mu) with int x^s e^{x mu - x^2/2} dx = sqrt(2 pi) e^{mu^2/2} B_s(mu)."""
    mu = Fraction(mu)
    return sum(comb(s, 2 * k) * _dfact(2 * k - 1) * mu ** (s - 2 * k) for k in range(s // 2 + 1))


def _dfact(n):
    return prod(range(n, 0, -2)) if n > 0 else 1


def _det(M):
    from .gkm import det
    return det(M)


def different_sizes_lhs(M: int, mus):
    """N-fold side: det[B_{M+i-1}(mu_j)] / Delta(mu) * prod mu_j^-M."""
    mus = [Fraction(m) for m in mus]
    n = len(mus)
    A = [[appell_B(M + i, mu) for mu in mus] for i in range(n)]
    vdm = prod((mus[j] - mus[i] for i in range(n) for j in range(i + 1, n)), start=Fraction(1))
    return Fraction(_det(A)) / vdm * prod((mu ** -M for mu in mus), start=Fraction(1))


def different_sizes_rhs(M: int, mus, propagator_weight=-1):
    """M-fold side: <prod_j det(1 - Y/mu_j)> = <exp(-sum_k xi_k tr Y^k)> with
    Miwa times xi_k = (1/k) sum_j mu_j^-k.  The weight-(N*M) truncation is
    exact since higher components vanish for M x M matrices."""
    mus = [Fraction(m) for m in mus]
    if M == 0:
        return Fraction(1)
    D = len(mus) * M
    Z = onematrix_series(M, D, propagator_weight)
    e = Space(("eps",), (1,), D)
    eps = TruncatedSeries.var(e, "eps")
    mapping = {f"xi{k}": (eps ** k).scale(sum(mu ** -k for mu in mus) / k) for k in range(1, D + 1)}
    s = Z.compose(e, mapping)
    return sum(s.terms.values(), Fraction(0))


def different_sizes_identity_check(N: int, M: int, mus, propagator_weight=-1):
    """Residual lhs - rhs of the N-fold / M-fold identity (exact)."""
    mus = [Fraction(m) for m in mus]
    if len(mus) != N:
        raise WickError(f"need N={N} values of mu")
    if len(set(mus)) != N:
        raise WickError("coincident mu values")
    if M == 0:
        return Fraction(0)
    return different_sizes_lhs(M, mus) - different_sizes_rhs(M, mus, propagator_weight)


# --- Jacobian Monte Carlo ---

@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int
    sizes: tuple          # (alpha*N, gamma*N)
    N: Fraction = Fraction(1)
    batch: int = 100_000


OBSERVABLES = ("tr_RR", "tr_RR2")


def _delta_sq_terms(n):
    """Delta(x)^2 = sum_{s,t} sgn(s)sgn(t) prod x_i^{s(i)+t(i)}."""
    from .gkm import _perm_sign
    out = {}
    for s in itertools.permutations(range(n)):
        for t in itertools.permutations(range(n)):
            e = tuple(a + b for a, b in zip(s, t))
            out[e] = out.get(e, 0) + _perm_sign(s) * _perm_sign(t)
    return out


def exact_eigen_moment(na: int, ng: int, N, observable: str) -> Fraction:
    """Eigenvalue-measure average of sum x_i (tr R^+R) or sum x_i^2."""
    if not (ng >= na >= 1):
        raise WickError("need gamma*N >= alpha*N >= 1")
    N = Fraction(N)
    s = ng - na
    power = {"tr_RR": 1, "tr_RR2": 2}[observable]

    def integral(e):
        return prod((Fraction(factorial(k + s)) / N ** (k + s + 1) for k in e), start=Fraction(1))

    norm = Fraction(0)
    num = Fraction(0)
    for e, c in _delta_sq_terms(na).items():
        norm += c * integral(e)
        for j in range(na):
            ee = list(e)
            ee[j] += power
            num += c * integral(ee)
    return num / norm


def wick_moment(na, ng, N, observable):
    """Closed forms from entrywise Wick contractions (independent check)."""
    N = Fraction(N)
    if observable == "tr_RR":
        return Fraction(na * ng) / N
    return Fraction(na * ng * (na + ng)) / N ** 2


def _stream(seed, index):
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def jacobian_mc_check(cfg: McConfig, observable: str, stream=0):
    """(estimate, exact, z) for the observable under e^{-N tr R R^+}."""
    if observable not in OBSERVABLES:
        raise WickError(f"unknown observable {observable!r}")
    na, ng = cfg.sizes
    if not (ng >= na >= 1):
        raise WickError("need gamma*N >= alpha*N >= 1")
    N = float(cfg.N)
    rng = _stream(cfg.seed, stream)
    sd = (1.0 / (2 * N)) ** 0.5
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < cfg.samples:
        b = min(cfg.batch, cfg.samples - done)
        R = rng.normal(0, sd, (b, ng, na)) + 1j * rng.normal(0, sd, (b, ng, na))
        W = np.einsum("bki,bkj->bij", R.conj(), R)
        if observable == "tr_RR":
            v = np.einsum("bii->b", W).real
        else:
            v = np.einsum("bij,bji->b", W, W).real
        total += float(v.sum())
        total_sq += float((v * v).sum())
        done += b
    mean = total / cfg.samples
    var = total_sq / cfg.samples - mean * mean
    se = (var / cfg.samples) ** 0.5
    exact = exact_eigen_moment(na, ng, cfg.N, observable)
    z = (mean - float(exact)) / se if se > 0 else 0.0
    return mean, exact, z
