import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pap1324.analysis import (RealSeries, amplitude_sequence, bs_tableau, exact_rational,
                              fit_log_quad, fit_log_triple_mu, fit_ratio_triple, loglog_gradient,
                              pair_extrapolate, ratios, renormalize, sigma_free,
                              sigma_local_given_mu, solve_exact)
from pap1324.errors import DomainError, SingularWindow
from pap1324.oracles import AsymptoticParams


def planted(params: AsymptoticParams, N: int, start: int = 1, dps: int = 80) -> RealSeries:
    """High-precision b_n = B mu^n mu1^(n^sigma) n^g."""
    p = params
    with mpmath.workdps(dps):
        vals = [mpmath.mpf(p.B) * mpmath.mpf(p.mu) ** n * mpmath.mpf(p.mu1) ** (mpmath.mpf(n) ** p.sigma)
                * mpmath.mpf(n) ** p.g for n in range(start, N + 1)]
    return RealSeries(vals, start)


def test_ratios_examples(reference):
    r = ratios(reference)
    assert r.start == 1 and r[1] == 1.0 and r[2] == 2.0
    assert r[6] == pytest.approx(4.980582524, abs=1e-9)
    with pytest.raises(DomainError):
        ratios([1, 0, 3])


def test_realseries_indexing():
    s = RealSeries([5, 6, 7], 3)
    assert s[3] == 5 and s.end == 5 and list(s.indices()) == [3, 4, 5]
    with pytest.raises(IndexError):
        s[2]


def test_exact_rational_keeps_sign():
    assert exact_rational(mpmath.mpf(-0.75)) == Fraction(-3, 4)
    assert exact_rational(0.5) == Fraction(1, 2)
    assert exact_rational(7) == 7


@settings(max_examples=40, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.sampled_from([0.5, 1.0, 1.5]))
def test_pair_extrapolate_exact_on_lines(a, b, t):
    s = RealSeries([a + b * n ** -t for n in range(1, 30)], 1)
    for v in pair_extrapolate(s, t).values:
        assert v == pytest.approx(a, abs=1e-7 * (1 + abs(a) + abs(b)))


def test_solve_exact():
    F = Fraction
    assert solve_exact([[F(2), F(1)], [F(1), F(3)]], [F(3), F(5)]) == [F(4, 5), F(7, 5)]
    with pytest.raises(SingularWindow):
        solve_exact([[F(1), F(2)], [F(2), F(4)]], [F(1), F(1)])


def test_fit_ratio_triple_planted():
    mu, c = 11.6, (-1.3, 0.7, 0.25)
    with mpmath.workdps(60):
        r = RealSeries([mpmath.mpf(mu) * (1 + c[0] / mpmath.sqrt(j) + mpmath.mpf(c[1]) / j
                                         + c[2] * mpmath.mpf(j) ** -1.5) for j in range(1, 40)], 1)
    fit = fit_ratio_triple(r, mu)
    for win in fit.windows.values():
        assert win == pytest.approx(c, abs=1e-12)
    assert min(fit.windows) == 2 and max(fit.windows) == 38


def test_fit_log_quad_planted():
    p = AsymptoticParams(9.5, 11.6, 0.04, 0.5, -1.1)
    fit = fit_log_quad(planted(p, 40))
    want = (math.log(p.mu), math.log(p.mu1), p.g, math.log(p.B))
    for win in fit.windows.values():
        assert win == pytest.approx(want, abs=1e-10)
    assert fit.basis == ("c1", "c2", "c3", "c4")


def test_fit_log_triple_mu_planted():
    p = AsymptoticParams(3.0, 8.0, 0.2, 0.5, -2.5)
    fit = fit_log_triple_mu(planted(p, 30), p.mu)
    for win in fit.windows.values():
        assert win == pytest.approx((math.log(p.mu1), p.g, math.log(p.B)), abs=1e-10)


@pytest.mark.parametrize("sigma", [1 / 3, 1 / 2, 2 / 3])
def test_sigma_recovery(sigma):
    p = AsymptoticParams(2.0, 10.0, 0.05, sigma, 0.0)
    s = planted(p, 200)
    assert loglog_gradient(sigma_free(s))[200] == pytest.approx(sigma - 2, abs=0.05)


def test_sigma_local_tracks_planted_value():
    p = AsymptoticParams(2.0, 10.0, 0.05, 0.5, -1.0)
    local = sigma_local_given_mu(ratios(planted(p, 200)), p.mu)
    assert 1 - local[200] == pytest.approx(0.5, abs=0.05)


def test_sigma_free_is_exact_on_integers(reference):
    sf = sigma_free(reference)
    assert sf.start == 2
    assert sf[8] == pytest.approx(float(Fraction(reference.coefficients[8] * reference.coefficients[6],
                                                 reference.coefficients[7] ** 2)), rel=1e-15)


def test_renormalize_removes_stretched_factor():
    p = AsymptoticParams(4.0, 11.6, 0.04, 0.5, -1.1)
    d = renormalize(planted(p, 200), dps=30)
    assert float(ratios(d)[200]) == pytest.approx(p.mu, rel=0.01)
    # the raw ratios are still visibly depressed by mu1**sqrt(n)
    assert float(ratios(planted(p, 200))[200]) < 0.99 * p.mu


def test_renormalize_log_and_precision(reference):
    c = renormalize(reference, log=True)
    d = renormalize(reference, dps=50)
    assert c.start == d.start == 2
    for n in c.indices():
        assert float(mpmath.exp(c[n])) == pytest.approx(float(d[n]), rel=1e-12)
    assert isinstance(d[10], mpmath.mpf)


def test_amplitude_planted():
    p = AsymptoticParams(9.5, 11.6, 0.04, 0.5, -1.1)
    amp = amplitude_sequence(planted(p, 50), p)
    assert all(v == pytest.approx(9.5, rel=1e-10) for v in amp.values)


def test_amplitude_pure_exponential(reference):
    amp = amplitude_sequence(reference, AsymptoticParams(1.0, 11.6))
    for n, v in amp.items():
        assert v == pytest.approx(reference.coefficients[n] / 11.6 ** n, rel=1e-12)


def test_bs_converges_on_model_sequence():
    s = RealSeries([math.pi + 1.5 * n ** -0.5 - 0.7 / n + 0.2 * n ** -1.5 for n in range(1, 37)], 1)
    tab = bs_tableau(s, 0.5, 4)
    assert abs(tab.last(4) - math.pi) < abs(tab.last(0) - math.pi) * 1e-3
    assert len(tab.row(4)) == 32 and tab.row(4).start == 1


def test_bs_reference_extrapolates(reference):
    tab = bs_tableau(ratios(reference), 0.5, 4)
    assert 11.0 < tab.last(4) < 12.2


@pytest.mark.parametrize("w", [0.5, 1.0, 2.0])
def test_bs_one_term_model_exact(w):
    # the rational tableau (T(-1) = 0) becomes exact one row later than Neville would
    tab = bs_tableau(RealSeries([5 + 3 * n ** -w for n in range(1, 20)], 1), w, 2)
    assert all(v == pytest.approx(5, abs=1e-11) for v in tab.row(2).values)
    assert tab.row(0).values == tuple(5 + 3 * n ** -w for n in range(1, 20))


def test_bs_marks_nan():
    tab = bs_tableau(RealSeries([2.0] * 10, 1), 1.0, 2)
    assert tab.valid(1, 1) and not tab.valid(2, 1)


def test_bs_argument_checks():
    with pytest.raises(ValueError):
        bs_tableau(RealSeries([1.0, 2.0], 1), 0.5, 4)
    with pytest.raises(ValueError):
        bs_tableau(RealSeries([1.0] * 5, 0), 0.5, 2)
    with pytest.raises(ValueError):
        bs_tableau(RealSeries([1.0] * 5, 1), 0.0, 2)
