import json
from fractions import Fraction as F

import mpmath
import pytest

from dessins import spectral
from dessins.dessins import connected_gf
from dessins.series import TruncatedSeries
from dessins.spectral import CurveError
from dessins.suite import F0_FIXTURES, f0_fixture

EXACT = [(1, 1), (1, 4), (F(1, 4), F(9, 4))]
ALL = EXACT + [(1, 2)]


def _oracle(gs, g, be, ga):
    s = gs[g].map_coeffs(lambda c: c.evaluate(beta=F(be), gamma=F(ga), N=F(1)))
    return s


def _close(ours, oracle, ring, tol=mpmath.mpf(10) ** -60):
    if ring == "exact":
        return ours == oracle
    num = oracle.map_coeffs(lambda c: mpmath.mpf(c.numerator) / c.denominator)
    return (ours - num).max_abs() < tol


def _contour(f, a, b, k):
    R = 4 * (abs(a) + abs(b)) + 10

    def integrand(th):
        w = R * mpmath.expj(th)
        S = w * mpmath.sqrt((1 - a / w) * (1 - b / w))
        return f(w) * w ** k / S * w  # dw = i w dth
    return mpmath.quad(integrand, [0, 2 * mpmath.pi]) / (2 * mpmath.pi)


@pytest.mark.parametrize("f,fd,a,b,k,want", [
    ({1: 1}, lambda w: w, 2, -2, 1, 2),
    ({1: 1}, lambda w: w, 3, -3, 0, 0),
    ({0: 1}, lambda w: 1, 5, 1, 0, 1),
    ({0: 2, 2: -1}, lambda w: 2 - w * w, F(9, 2), F(1, 2), 1, None),
])
def test_residue_expansion(f, fd, a, b, k, want):
    got = spectral.residue_expansion(f, F(a), F(b), k)
    if want is not None:
        assert got == want
    assert abs(_contour(fd, mpmath.mpf(float(a)), mpmath.mpf(float(b)), k) - float(got)) < 1e-10 * max(1, abs(float(got)))


def test_seeds():
    assert spectral.t0_branch_points(1, 4) == (9, 1)
    assert spectral.t0_branch_points(F(1, 4), F(9, 4)) == (4, 1)
    with pytest.raises(CurveError):
        spectral.t0_branch_points(1, 2)
    with pytest.raises(CurveError):
        spectral.t0_branch_points(-1, 2)


@pytest.mark.parametrize("be,ga", EXACT)
def test_exact_constraints_vanish(be, ga):
    c = spectral.solve_branch_points(be, ga, 5)
    assert c.ring == "exact"
    assert all(r.is_zero() for r in spectral.constraint_residuals(c))


def test_bigfloat_constraints():
    c = spectral.solve_branch_points(1, 2, 5)
    assert c.ring == "float"
    assert c.a.constant() > c.b.constant() > 0
    assert all(r.max_abs() < mpmath.mpf(10) ** -30 for r in spectral.constraint_residuals(c))


def test_hard_edge_curve():
    c = spectral.solve_branch_points(1, 1, 3)
    assert c.hard_edge and c.a.constant() == 4
    with pytest.raises(CurveError):
        spectral.moments(c, 1)


def test_y_curve():
    c = spectral.solve_branch_points(1, 2, 5)
    Y = spectral.y_of_x(c)
    e = Y.expansion(-2)
    # polynomial part is U'(x), the 1/x coefficient is -(beta+gamma)
    for j in range(0, 4):
        want = c.u[j]
        assert (e[j] - want).max_abs() < mpmath.mpf(10) ** -60
    assert abs(e[-1].constant() + 3) < mpmath.mpf(10) ** -60
    a = c.a.constant()
    assert Y(a) == 0
    assert mpmath.im(Y(a + 1)) == 0 and Y(a + 1) > 0


@pytest.mark.parametrize("be,ga", ALL)
def test_genus0_vs_oracle(gf6, be, ga):
    c = spectral.solve_branch_points(be, ga, 6)
    o = _oracle(gf6, 0, be, ga)
    for r, d in enumerate(spectral.genus0_derivatives(c, 6), start=1):
        assert _close(d, o.differentiate(f"t{r}"), c.ring)


def test_genus0_examples():
    c = spectral.solve_branch_points(1, 1, 3)
    d = spectral.genus0_derivatives(c, 2)
    assert d[0].constant() == 1 and d[1].constant() == 1
    with pytest.raises(CurveError):
        spectral.genus0_derivatives(c, 4)


@pytest.mark.parametrize("be,ga", ALL)
def test_f1_vs_oracle(gf6, be, ga):
    c = spectral.solve_branch_points(be, ga, 6)
    assert _close(spectral.f1(c), _oracle(gf6, 1, be, ga), c.ring)


def test_f1_t3_at_hard_edge():
    assert spectral.f1(spectral.solve_branch_points(1, 1, 3)).coeff(t3=1) == F(1, 3)


def test_f1_degenerate():
    sp = spectral.time_space(2)
    one = TruncatedSeries.const(sp, 1)
    fake = spectral.SpectralCurveData(F(1), F(2), 2, one, one, spectral.potential_coefficients(sp, 2),
                                      "exact", (1, 1))
    with pytest.raises(CurveError):
        spectral.f1(fake)


@pytest.mark.parametrize("be,ga", [(1, 2), (1, 4)])
def test_f0_via_contour(gf6, be, ga):
    c = spectral.solve_branch_points(be, ga, 6)
    F0 = spectral.f0_via_contour(c)
    assert _close(F0, _oracle(gf6, 0, be, ga), c.ring)
    for r, d in enumerate(spectral.genus0_derivatives(c, 6), start=1):
        if c.ring == "exact":
            assert F0.differentiate(f"t{r}") == d
    assert abs(spectral._mp(F0.coeff(t2=1)) - spectral._mp(F(be * ga * (be + ga), 2))) < mpmath.mpf(10) ** -60


def test_f0_via_contour_hard_edge_t1_squared():
    F0 = spectral.f0_via_contour(spectral.solve_branch_points(1, 1, 3))
    assert F0.coeff(t1=2) == F(1, 2)


def test_moments_times_vs_miwa():
    mc = spectral.solve_miwa(1, 1, 2, 3, [F(100), F(150), F(240)])
    for r in (1, 2, 3):
        M, J = spectral.moments_miwa(mc, r)
        Mt, Jt = spectral.moments_times_numeric(mc, r)
        assert abs(M - Mt) < mpmath.mpf(10) ** -25 and abs(J - Jt) < mpmath.mpf(10) ** -25


def test_moments_t0_values():
    c = spectral.solve_branch_points(1, 4, 3)
    M, J = spectral.moments(c, 1)
    a, b = F(9), F(1)
    # at t = 0, U' = 1: M1 = kappa/a, J1 = kappa/b with kappa = q/sqrt(ab)
    assert M.constant() == F(1) / a and J.constant() == F(1) / b


@pytest.mark.parametrize("fx", F0_FIXTURES)
def test_f0_closed_vs_oracle(fx):
    val, S, T = f0_fixture(*fx)
    assert abs(val - S) <= 2 * abs(T)
    assert abs(val - S - T) < abs(val - S)


def test_f0_closed_uncorrected_form_misses():
    val, S, T = f0_fixture(*F0_FIXTURES[0], form="uncorrected")
    assert abs(val - S) > 1e-3


def test_f0_stationary():
    lt = [F(50), F(72)]
    mc = spectral.solve_miwa(2, 1, 3, 1, lt)
    fa, fb = spectral.f0_stationarity(mc)
    assert abs(fa) < 1e-40 and abs(fb) < 1e-40
    pa, pb = spectral.f0_stationarity(mc, form="uncorrected")
    assert abs(pa) + abs(pb) > 1e-3


def test_f0_closed_decays():
    vals = [abs(spectral.f0_closed([F(10) ** k], 1, 1, 2, 1)) for k in (3, 4, 5)]
    assert vals[0] > 5 * vals[1] > 25 * vals[2]


def test_f0_closed_errors():
    with pytest.raises(CurveError):
        spectral.f0_closed([F(50)], 1, 2, 2, 1)
    with pytest.raises(CurveError):
        spectral.f0_closed([F(50), F(60)], 1, 1, 2, 1)
    with pytest.raises(CurveError):
        spectral.solve_miwa(1, 1, 2, 1, [F(1, 2)])


def test_potential_spec_and_report():
    pot = spectral.PotentialSpec(F(1), F(4), D=4)
    c = spectral.solve(pot)
    gs = connected_gf(4)
    rep = spectral.report(c, gs.map(lambda s: s.map_coeffs(lambda x: x.evaluate(beta=F(1), gamma=F(4), N=F(1)))))
    json.dumps(rep)
    assert set(rep) >= {"params", "a", "b", "residual_norms", "F0_series", "F1_series", "comparison_vs_oracle"}
    assert rep["comparison_vs_oracle"]["genus0_max_abs_delta"] == "0"
    with pytest.raises(CurveError):
        spectral.PotentialSpec(F(1), F(2), mode="miwa", lambdas=(0,))
