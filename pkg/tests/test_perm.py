import itertools
import random
from math import factorial

import pytest

from dessins.perm import (PermError, Permutation, PermPair, compose, conjugacy_classes,
                          cycle_type, genus_of_pair, inverse, is_transitive, representative)


def P(*imgs):
    return Permutation(imgs)


def cyc(d, *cycles):
    return Permutation.from_cycles(d, *cycles)


@pytest.mark.parametrize("imgs,ct", [((1, 2, 3), (1, 1, 1)), ((2, 1, 3), (2, 1)), ((2, 3, 1), (3,))])
def test_cycle_type(imgs, ct):
    assert cycle_type(P(*imgs)) == ct


def test_invalid_images():
    with pytest.raises(PermError):
        P(1, 1, 2)


def test_composition_convention():
    p, q = P(2, 1, 3), P(1, 3, 2)
    # (p o q)(i) = p(q(i))
    assert compose(p, q)(2) == p(q(2)) == 3
    assert compose(inverse(p), p) == Permutation.identity(3)


def test_transitivity_examples():
    e2 = Permutation.identity(2)
    assert not is_transitive(PermPair(e2, e2))
    assert is_transitive(PermPair(e2, cyc(2, [1, 2])))
    assert is_transitive(PermPair(cyc(4, [1, 2], [3, 4]), cyc(4, [1, 3], [2, 4])))


def test_degree_mismatch():
    with pytest.raises(PermError):
        PermPair(Permutation.identity(2), Permutation.identity(3))


def test_genus_examples():
    e1 = Permutation.identity(1)
    assert genus_of_pair(PermPair(e1, e1)) == 0
    c3 = cyc(3, [1, 2, 3])
    assert genus_of_pair(PermPair(c3, c3)) == 1
    t = cyc(2, [1, 2])
    assert genus_of_pair(PermPair(t, t)) == 0


def test_genus_needs_transitive():
    e2 = Permutation.identity(2)
    with pytest.raises(PermError):
        genus_of_pair(PermPair(e2, e2))


def test_conjugacy_classes_examples():
    assert conjugacy_classes(1) == [((1,), 1)]
    assert sorted(conjugacy_classes(2)) == sorted([((2,), 1), ((1, 1), 1)])
    assert sorted(conjugacy_classes(3)) == sorted([((3,), 2), ((2, 1), 3), ((1, 1, 1), 1)])


@pytest.mark.parametrize("d", range(1, 10))
def test_class_sizes_sum_to_factorial(d):
    classes = conjugacy_classes(d)
    assert sum(s for _, s in classes) == factorial(d)
    for parts, _ in classes:
        assert cycle_type(representative(parts)) == parts


def test_s3_buckets_by_enumeration():
    counts = {}
    for imgs in itertools.permutations(range(1, 4)):
        ct = cycle_type(Permutation(imgs))
        counts[ct] = counts.get(ct, 0) + 1
    assert counts == dict(conjugacy_classes(3))


def test_pair_invariants_on_s4():
    perms = [Permutation(p) for p in itertools.permutations(range(1, 5))]
    rnd = random.Random(3)
    for s0 in perms:
        for s1 in perms:
            pair = PermPair(s0, s1)
            if not is_transitive(pair):
                continue
            g = genus_of_pair(pair)
            assert g >= 0
            assert genus_of_pair(PermPair(s1, s0)) == g
            pi = rnd.choice(perms)
            assert cycle_type(compose(compose(pi, s0), inverse(pi))) == cycle_type(s0)
