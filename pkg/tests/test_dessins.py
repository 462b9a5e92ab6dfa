import io
import itertools
from fractions import Fraction as F
from math import factorial

import pytest

from dessins.dessins import (CapError, CountFilter, ModelParams, connected_gf, evaluate, exp_connected,
                             export_csv, partition_function, series_space, swap_beta_gamma)
from dessins.perm import Permutation, PermPair, cycle_type, genus_of_pair, is_transitive, n_cycles
from dessins.rings import PARAMS, LaurentPoly, param
from dessins.series import TruncatedSeries

b, g = param("beta"), param("gamma")


def test_degree_one_anchor():
    gs = connected_gf(1)
    assert gs.genera() == [0]
    assert gs[0].coeff(t1=1) == b * g


def test_degree_two():
    gs = connected_gf(2)
    assert gs[0].coeff(t1=2) == b * g * F(1, 2)
    assert gs[0].coeff(t2=1) == (b * b * g + b * g * g) * F(1, 2)
    assert gs.genera() == [0]


def test_genus_one_t3():
    assert connected_gf(3)[1].coeff(t3=1) == b * g * F(1, 3)


def test_partition_small():
    assert partition_function(0) == TruncatedSeries.const(series_space(0), 1)
    z1 = partition_function(1)
    assert z1.constant() == 1
    assert z1.coeff(t1=1) == b * g * LaurentPoly.var(PARAMS, "N", 2)


def test_exp_connected_equals_all_pairs(gf6, z6):
    assert exp_connected(gf6) == z6


def test_beta_gamma_symmetry(gf6):
    assert swap_beta_gamma(gf6) == gf6


def _brute(d):
    """Per-pair sum using perm-core only (union-find transitivity)."""
    out = {}
    perms = [Permutation(p) for p in itertools.permutations(range(1, d + 1))]
    for s0 in perms:
        for s1 in perms:
            pair = PermPair(s0, s1)
            if not is_transitive(pair):
                continue
            key = (genus_of_pair(pair), cycle_type(pair.sigma_inf), n_cycles(s1), n_cycles(s0))
            out[key] = out.get(key, 0) + 1
    return out


@pytest.mark.parametrize("d", [2, 3, 4])
def test_matches_independent_enumeration(gf6, d):
    for (genus, ct, c1, c0), n in _brute(d).items():
        exps = {f"t{r}": ct.count(r) for r in set(ct)}
        c = gf6[genus].coeff(**exps)
        assert c.terms.get(_key(c, c1, c0), 0) * factorial(d) == n


def _key(poly, c1, c0):
    idx = {v: i for i, v in enumerate(poly.vars)}
    e = [0] * len(poly.vars)
    e[idx["beta"]] = c1
    e[idx["gamma"]] = c0
    return tuple(e)


def test_weight_and_genus_bounds(gf6):
    sp = gf6.space
    for genus in gf6.genera():
        for k in gf6[genus].terms:
            d = sp.weight_of(k)
            assert 2 - 2 * genus >= 3 - d or d <= 2
            assert genus <= (d + 1) // 2


def test_clean_strict_odd_degrees_vanish():
    gs = connected_gf(6, CountFilter.CLEAN_STRICT)
    for genus in gs.genera():
        for k in gs[genus].terms:
            assert gs.space.weight_of(k) % 2 == 0
            # sigma1 of type (2,...,2) has d/2 cycles
            for e in gs[genus].terms[k].terms:
                assert e[0] == gs.space.weight_of(k) // 2


def test_clean_loose_contains_strict():
    strict = connected_gf(4, CountFilter.CLEAN_STRICT)
    loose = connected_gf(4, CountFilter.CLEAN_LOOSE)
    assert loose[0].coeff(t1=1) == b * g
    assert not strict[0].coeff(t1=1)
    assert loose[0].coeff(t2=1) - strict[0].coeff(t2=1) == b * b * g * F(1, 2)


def test_two_profile_records_sigma1():
    gs = connected_gf(2, CountFilter.TWO_PROFILE)
    gm = param("gamma")
    assert gs[0].coeff(t1=1, tt1=1) == gm
    with pytest.raises(CapError):
        connected_gf(8, CountFilter.TWO_PROFILE)


def test_cap():
    with pytest.raises(CapError):
        connected_gf(10)
    assert connected_gf(2, cap=2)[0].coeff(t1=1) == b * g


def test_evaluate_examples():
    s = series_space(2)
    bgt = TruncatedSeries.var(s, "t1").scale(b * g)
    e = evaluate(bgt, ModelParams(N=1, beta=-1, gamma=2), [1])
    assert e.coeff(eps=2) == -2 and len(e.terms) == 1
    e2 = evaluate(TruncatedSeries.var(s, "t2"), ModelParams(), [1, 1])
    assert e2.coeff(eps=4) == 2 and len(e2.terms) == 1
    assert evaluate(TruncatedSeries.zero(s), ModelParams(), []).is_zero()
    with pytest.raises(ValueError):
        evaluate(bgt, ModelParams(), [])


def test_time_scale():
    s = series_space(1)
    e = evaluate(TruncatedSeries.var(s, "t1"), ModelParams(N=2), [1, 3], time_scale=F(1, 2))
    assert e.coeff(eps=2) == 5


def test_csv_export():
    buf = io.StringIO()
    export_csv(connected_gf(2), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "degree,genus,monomial,coefficient"
    assert lines[1] == "1,0,t1,beta*gamma"


def test_filter_parse():
    assert CountFilter.parse("clean_strict") is CountFilter.CLEAN_STRICT
    with pytest.raises(ValueError):
        CountFilter.parse("bogus")
