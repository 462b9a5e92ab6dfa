"""Permutations in one-line notation (1-based images).

Composition convention, used everywhere in the package:
    compose(p, q)(i) = p(q(i)),
and sigma_infinity = inverse(compose(sigma0, sigma1)).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import factorial, prod

DEFAULT_DEGREE_CAP = 9


class PermError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    images: tuple

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise PermError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @property
    def d(self):
        return len(self.images)

    @classmethod
    def identity(cls, d):
        return cls(range(1, d + 1))

    @classmethod
    def from_cycles(cls, d, *cycles):
        img = list(range(1, d + 1))
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                img[a - 1] = b
        return cls(img)

    def __call__(self, i):
        return self.images[i - 1]

    def cycles(self):
        seen = set()
        out = []
        for s in range(1, self.d + 1):
            if s in seen:
                continue
            c = []
            i = s
            while i not in seen:
                seen.add(i)
                c.append(i)
                i = self(i)
            out.append(tuple(c))
        return out


def compose(p: Permutation, q: Permutation) -> Permutation:
    if p.d != q.d:
        raise PermError("degree mismatch")
    return Permutation(p.images[q.images[i] - 1] for i in range(p.d))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.d
    for i, x in enumerate(p.images):
        inv[x - 1] = i + 1
    return Permutation(inv)


def cycle_type(p: Permutation) -> tuple:
    return tuple(sorted((len(c) for c in p.cycles()), reverse=True))


def n_cycles(p: Permutation) -> int:
    return len(p.cycles())


@dataclass(frozen=True)
class PermPair:
    sigma0: Permutation
    sigma1: Permutation

    def __post_init__(self):
        if self.sigma0.d != self.sigma1.d:
            raise PermError("degree mismatch between sigma0 and sigma1")

    @property
    def d(self):
        return self.sigma0.d

    @property
    def sigma_inf(self):
        return inverse(compose(self.sigma0, self.sigma1))


def is_transitive(pair: PermPair) -> bool:
    d = pair.d
    parent = list(range(d + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = d
    for g in (pair.sigma0, pair.sigma1):
        for i in range(1, d + 1):
            a, b = find(i), find(g(i))
            if a != b:
                parent[a] = b
                comps -= 1
    return comps == 1


class GenusError(ArithmeticError):
    pass


def euler_char(pair: PermPair) -> int:
    return n_cycles(pair.sigma0) + n_cycles(pair.sigma1) + n_cycles(pair.sigma_inf) - pair.d


def genus_of_pair(pair: PermPair) -> int:
    if not is_transitive(pair):
        raise PermError("genus is undefined for a non-transitive pair")
    chi = euler_char(pair)
    if chi % 2 or chi > 2:
        raise GenusError(f"inconsistent Euler characteristic {chi}")
    return (2 - chi) // 2


def partitions(d, max_part=None):
    """Partitions of d as weakly decreasing tuples, largest first."""
    if max_part is None:
        max_part = d
    if d == 0:
        yield ()
        return
    for k in range(min(d, max_part), 0, -1):
        for rest in partitions(d - k, k):
            yield (k,) + rest


def class_size(parts) -> int:
    d = sum(parts)
    mult = Counter(parts)
    return factorial(d) // prod(l ** m * factorial(m) for l, m in mult.items())


def conjugacy_classes(d: int):
    if d < 1:
        raise PermError("degree must be positive")
    return [(p, class_size(p)) for p in partitions(d)]


def representative(parts) -> Permutation:
    """A permutation with the given cycle type, cycles on consecutive symbols."""
    d = sum(parts)
    cycles = []
    start = 1
    for l in parts:
        cycles.append(tuple(range(start, start + l)))
        start += l
    return Permutation.from_cycles(d, *cycles)
