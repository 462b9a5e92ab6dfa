import random
from fractions import Fraction as F

import pytest

from dessins import virasoro
from dessins.dessins import partition_function
from dessins.series import TruncatedSeries
from dessins.suite import _monomials, v_params
from dessins.virasoro import OperatorSpec, apply, annihilation_check, commutator, to_tilde_times
from dessins.wick import onematrix_series


def _random(D, seed):
    rnd = random.Random(seed)
    sp = virasoro.tilde_space(D)
    return TruncatedSeries(sp, {k: F(rnd.randint(-9, 9), rnd.randint(1, 6)) for k in _monomials(sp)})


def _Zt(alpha, beta, gamma, N, D=6, Z=None):
    Z = Z if Z is not None else partition_function(D)
    vals = dict(beta=F(beta), gamma=F(gamma), N=F(N))
    return to_tilde_times(Z.map_coeffs(lambda c: c.evaluate(**vals)), alpha, N)


@pytest.fixture(scope="module")
def Z6():
    return partition_function(6)


def test_time_conversion():
    from dessins.dessins import series_space
    s = series_space(3)
    t2 = TruncatedSeries.var(s, "t2")
    out = to_tilde_times(t2, F(3), 2)
    # t_2 = 2 T_2 / (N (2 alpha)^2)
    assert out.coeff(T2=1) == F(2, 2 * 36)


def test_v0_on_one_is_anomaly():
    sp = virasoro.tilde_space(3)
    one = TruncatedSeries.const(sp, 1)
    out = apply(OperatorSpec("V", 0, Nt=F(2), at=F(1, 3), bt=F(5)), one)
    assert out == TruncatedSeries.const(out.space, F(4) * F(1, 3) * 4)


def test_l1mm_minus_one_on_one():
    one = TruncatedSeries.const(onematrix_series(1, 3, 1).space, 1)
    out = apply(OperatorSpec("L1MM", -1, M=F(1)), one)
    # only the xi_1 d/dxi_0 -> -M xi_1 term survives; it vanishes at xi = 0
    assert out.constant() == 0
    assert out == TruncatedSeries.var(out.space, "xi1", -1)


def test_linearity():
    a, b = _random(5, 1), _random(5, 2)
    op = OperatorSpec("V", 2, Nt=F(3), at=F(1, 2), bt=F(-1))
    assert apply(op, a.scale(3) + b.scale(F(-1, 2))) == apply(op, a).scale(3) + apply(op, b).scale(F(-1, 2))


@pytest.mark.parametrize("params", [(1, -1, 2, 1), (2, 1, 3, 1), (1, F(1, 2), 3, 2), (F(1, 2), 2, 1, 2)])
def test_v_annihilates_oracle(Z6, params):
    ZT = _Zt(*params, Z=Z6)
    rows = annihilation_check("V", ZT, 3, k_min=0, **v_params(*params))
    assert rows and all(r[3] == 0 for r in rows)


def test_v_minus_one_does_not_annihilate(Z6):
    ZT = _Zt(1, -1, 2, 1, Z=Z6)
    out = apply(OperatorSpec("V", -1, **v_params(1, -1, 2, 1)), ZT)
    assert not out.is_zero()


def test_corrupted_series_flagged(Z6):
    ZT = _Zt(2, 1, 3, 1, Z=Z6)
    k = next(k for k in ZT.terms if ZT.space.weight_of(k) == 2)
    bad = TruncatedSeries(ZT.space, dict(ZT.terms))
    bad = bad + TruncatedSeries(ZT.space, {k: F(1)})
    rows = annihilation_check("V", bad, 2, k_min=1, **v_params(2, 1, 3, 1))
    nonzero = [(kk, o) for _, kk, o, r in rows if r != 0]
    assert nonzero and min(o for _, o in nonzero) <= 2


@pytest.mark.parametrize("k", range(3))
@pytest.mark.parametrize("l", range(3))
def test_commutators(k, l):
    R = _random(7, 10 * k + l)
    prm = dict(Nt=F(2), at=F(1, 3), bt=F(-1, 2))
    assert commutator(k, l, R, **prm).is_zero()


def test_commutators_with_minus_one_fail_as_recorded():
    R = _random(6, 3)
    Nt, at, bt = F(2), F(1, 3), F(-1, 2)
    prm = dict(Nt=Nt, at=at, bt=bt)
    # [V_-1, V_1] - 2 V_0 leaves -2 times the anomaly constant
    c = commutator(-1, 1, R, **prm)
    assert c == R.truncate(c.max_weight).scale(-2 * Nt * Nt * at * (bt - 1))


@pytest.mark.parametrize("D", [4])
def test_l1mm_gaussian(D):
    W = onematrix_series(2, D + 5, 1)
    rows = annihilation_check("L1MM", W, 3, k_min=-1, M=2, base=((2, F(1, 2)),))
    assert all(r[3] == 0 for r in rows)
    for k in range(-1, 4):
        assert max(o for _, kk, o, _ in rows if kk == k) >= D


def test_l1mm_at_d4_certifies_n_le_2():
    W = onematrix_series(2, 4, 1)
    rows = annihilation_check("L1MM", W, 2, k_min=0, M=2, base=((2, F(1, 2)),))
    assert all(r[3] == 0 for r in rows)
    with pytest.raises(virasoro.OperatorError):
        annihilation_check("L1MM", W, 3, k_min=3, M=2, base=((2, F(1, 2)),))


def test_order_beyond_certification():
    R = _random(4, 0)
    with pytest.raises(virasoro.OperatorError):
        virasoro.residual_table(OperatorSpec("V", 1), R, max_order=4)


def test_bad_family():
    with pytest.raises(virasoro.OperatorError):
        OperatorSpec("W", 1)
    with pytest.raises(virasoro.OperatorError):
        OperatorSpec("V", -2)
