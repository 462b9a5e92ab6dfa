import random
from fractions import Fraction as F

import pytest

from dessins import gkm
from dessins.dessins import CountFilter, ModelParams, connected_gf, evaluate
from dessins.series import TruncatedSeries, time_space
from dessins.suite import gkm_vs_oracle


def test_gamma_moment():
    assert gkm.gamma_moment(0, 3) == F(1, 3)
    assert gkm.gamma_moment(2, 2) == F(2, 8)
    assert gkm.gamma_moment(1, 5, N=2) == F(1, 4 * 25)


def test_twolog_kernel_example():
    k = gkm.kernel(gkm.KernelSpec(gkm.Variant.TWO_LOG, m=1, p=1))
    for xi in (F(2), F(7, 3)):
        assert k.value(xi) == 1 / xi ** 2 - 2 / xi ** 3


def test_clean_kernel_first_orders():
    k = gkm.kernel(gkm.KernelSpec(gkm.Variant.CLEAN, m=0, p=2), order=4)
    assert k.asymptotic
    assert k.coeffs[0] == 1 and k.coeffs[2] == -2 and k.coeffs.get(1, 0) == 0
    with pytest.raises(gkm.KernelError):
        k.value(3)


def test_clean_kernel_shift():
    k = gkm.kernel(gkm.KernelSpec(gkm.Variant.CLEAN, m=0, p=2, shift=F(-1)), order=3)
    # 1/(xi+1) - 2/(xi+1)^3 expanded: 1/xi - 1/xi^2 + (1-2)/xi^3 + ...
    assert k.coeffs[0] == 1 and k.coeffs[1] == -1 and k.coeffs[2] == -1


def test_spec_invariants():
    with pytest.raises(gkm.KernelError):
        gkm.KernelSpec(gkm.Variant.TWO_LOG, m=-1)
    with pytest.raises(gkm.KernelError):
        gkm.KernelSpec(gkm.Variant.CLEAN, m=0, p=0)
    with pytest.raises(gkm.KernelError):
        gkm.KernelSpec(gkm.Variant.TWO_PROFILE, m=0)
    with pytest.raises(gkm.KernelError):
        gkm.twolog_spec(ModelParams(N=1, alpha=1, beta=F(1, 2), gamma=2))


def test_wronskian_ratio_single_and_symmetric():
    k = gkm.kernel(gkm.KernelSpec(gkm.Variant.TWO_LOG, m=1, p=2))
    assert gkm.wronskian_ratio(k, [F(3)]) == k.value(3)
    pts = [F(2), F(5), F(7, 2)]
    base = gkm.wronskian_ratio(k, pts)
    rnd = random.Random(0)
    for _ in range(4):
        rnd.shuffle(pts)
        assert gkm.wronskian_ratio(k, pts) == base
    with pytest.raises(gkm.KernelError):
        gkm.wronskian_ratio(k, [F(2), F(2)])


def test_wronskian_ratio_two_points_direct():
    # f = 1/xi: det [[1/x, 1/y], [-1/x^2, -1/y^2]] / (y - x) = 1/(x y)^2 * (x - y)... check by hand
    k = gkm.kernel(gkm.KernelSpec(gkm.Variant.TWO_LOG, m=0, p=0))
    x, y = F(2), F(3)
    assert gkm.wronskian_ratio(k, [x, y]) == (-1 / (x * y * y) + 1 / (y * x * x)) / (y - x)


def test_twolog_small_is_polynomial():
    p = ModelParams(N=1, alpha=1, beta=-1, gamma=2)
    Z = gkm.gkm_partition(gkm.twolog_spec(p), [1], 8)
    assert Z == TruncatedSeries(Z.space, {(0,): F(1), (2,): F(-2)})


def test_pure_gaussian_normalisation():
    p = ModelParams(N=1, alpha=1, beta=0, gamma=1)
    Z = gkm.gkm_partition(gkm.twolog_spec(p), [F(3, 2)], 6)
    assert Z == TruncatedSeries.const(Z.space, 1)


@pytest.mark.parametrize("params,lams,d", [
    (ModelParams(N=1, alpha=1, beta=-1, gamma=2), [1], 4),
    (ModelParams(N=1, alpha=2, beta=-1, gamma=3), [1, 2], 5),
    (ModelParams(N=1, alpha=2, beta=-2, gamma=3), [1, 2], 5),
    (ModelParams(N=1, alpha=1, beta=-3, gamma=3), [F(1, 2)], 4),
    (ModelParams(N=2, alpha=F(1, 2), beta=-1, gamma=1), [1], 4),
    (ModelParams(N=2, alpha=1, beta=-1, gamma=2), [1, 3], 3),
])
def test_twolog_equals_oracle(params, lams, d):
    delta, Z, _ = gkm_vs_oracle(params, lams, d)
    assert delta == 0
    assert Z.constant() == 1


@pytest.mark.parametrize("params,lams", [
    (ModelParams(N=1, alpha=1, beta=-1, gamma=2), [1]),
    (ModelParams(N=1, alpha=1, beta=-2, gamma=1), [F(1, 2)]),
    (ModelParams(N=2, alpha=F(1, 2), beta=-1, gamma=1), [1]),
    (ModelParams(N=1, alpha=2, beta=-1, gamma=3), [1, 2]),
])
def test_clean_equals_strict_oracle(params, lams):
    spec = gkm.clean_spec(params, order=10)
    assert gkm_vs_oracle(params, lams, 4, CountFilter.CLEAN_STRICT, spec)[0] == 0


def test_shifted_clean_equals_loose_oracle():
    p = ModelParams(N=1, alpha=1, beta=-1, gamma=2)
    spec = gkm.clean_spec(p, order=10, shifted=True)
    assert gkm_vs_oracle(p, [1], 4, CountFilter.CLEAN_LOOSE, spec)[0] == 0
    # and the unshifted kernel does not see the loose profiles
    assert gkm_vs_oracle(p, [1], 4, CountFilter.CLEAN_LOOSE, gkm.clean_spec(p, order=10))[0] != 0


@pytest.mark.parametrize("N,gamma,lams", [(1, 2, [1]), (1, 3, [1, 2]), (2, 1, [1])])
def test_two_profile_equals_oracle(N, gamma, lams):
    N, D = F(N), 3
    gs = connected_gf(D, CountFilter.TWO_PROFILE)
    O = evaluate(gs, ModelParams(N=N, gamma=gamma), [], tt_lambdas=lams, keep_t=True, time_scale=1 / N).exp()
    spec = gkm.two_profile_spec(gamma, len(lams), N, TruncatedSeries.zero(time_space(D)))
    Z = gkm.gkm_partition(spec, lams, 3 * D)
    assert Z.space == O.space
    assert len(Z.terms) > 5
    assert Z == O


def test_size_mismatch():
    with pytest.raises(gkm.KernelError):
        gkm.twolog_spec(ModelParams(N=1, alpha=2, beta=-1, gamma=3), n_points=1)


def test_sd_single_equation():
    parts = gkm.sd_equation_check([F(2)], ModelParams(N=1, alpha=1, beta=-1, gamma=2))
    assert len(parts) == 1 and all(v == 0 for v in parts[0].values())


@pytest.mark.parametrize("params,lams", [
    (ModelParams(N=1, alpha=2, beta=-2, gamma=4), [F(2), F(3)]),
    (ModelParams(N=1, alpha=2, beta=-1, gamma=3), [F(2), F(5, 2)]),
    (ModelParams(N=1, alpha=2, beta=-2, gamma=2), [F(3), F(7)]),
])
def test_sd_two_equations(params, lams):
    parts = gkm.sd_equation_check(lams, params)
    assert len(parts) == 2
    assert all(v == 0 for eq in parts for v in eq.values())


def test_sd_is_sensitive():
    # wrong gamma in the operator relative to the partition function -> nonzero
    Nt, at, bt = F(1), F(-1), F(-1)
    Z, vars = gkm.sd_partition(Nt, 1, 1, 1)
    res = gkm.sd_operator(Z, vars, 0, Nt, at, bt + 1).evaluate_parts(**{vars[0]: F(2)})
    assert any(v != 0 for v in res.values())


def test_sd_rejects_bad_inputs():
    with pytest.raises(gkm.KernelError):
        gkm.sd_equation_check([F(2), F(2)], ModelParams(N=1, alpha=2, beta=-2, gamma=4))
    with pytest.raises(gkm.KernelError):
        gkm.sd_equation_check([F(2)], ModelParams(N=1, alpha=1, beta=F(-1, 2), gamma=2))


def test_ratexp_derivative_commutes_with_evaluation():
    Z, vars = gkm.sd_partition(F(1), 1, 1, 1)
    v = vars[0]
    dZ = Z.diff(v)
    h = F(1, 10 ** 6)
    x = F(3)
    num = (Z.evaluate_float(**{v: x + h}) - Z.evaluate_float(**{v: x - h})) / (2 * h)
    assert abs(num - dZ.evaluate_float(**{v: x})) < 1e-6 * max(1, abs(num))
