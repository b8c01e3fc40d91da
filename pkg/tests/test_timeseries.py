import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats
from statsmodels.stats.diagnostic import acorr_ljungbox
from statsmodels.tsa.arima.model import ARIMA
from statsmodels.tsa.stattools import acf as sm_acf, pacf as sm_pacf

from olympus_lab import rng
from olympus_lab.errors import DegenerateVariance, DomainError, NonConvergence
from olympus_lab.rules import OLYMPUS
from olympus_lab.timeseries import (NonStationary, WalkTrace, acf, aic, band_crossing,
                                    box_jenkins_identify, correlation_length, durbin_levinson,
                                    fit_arma, ljung_box, ljung_box_table, pacf, random_walk,
                                    simulate_arma)

REF_ARMA = dict(c=0.00281, ar=[1.5384, -0.5665], ma=[-0.7671])


def noise(seed, n):
    return rng.generator(seed, "noise", 0).normal(size=n)


# -- correlograms -------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_acf_matches_statsmodels(seed):
    y = simulate_arma(0.0, [0.6], [0.3], 800, seed)
    ours = acf(y, 30)
    ref = sm_acf(y, nlags=30, fft=False, adjusted=False)
    assert np.allclose(ours.values, ref, atol=1e-12)
    assert ours.band == pytest.approx(2 / math.sqrt(800))


@pytest.mark.parametrize("seed", [0, 1])
def test_pacf_matches_statsmodels(seed):
    y = simulate_arma(0.0, [0.5, -0.3], [], 600, seed)
    assert np.allclose(pacf(y, 20).values, sm_pacf(y, nlags=20, method="ldb"), atol=1e-10)


def test_durbin_levinson_on_ar1_acf():
    r = 0.7 ** np.arange(6)
    phi = durbin_levinson(r)
    assert phi[1] == pytest.approx(0.7)
    assert np.allclose(phi[2:], 0, atol=1e-12)


def test_white_noise_acf_within_band():
    c = acf(noise(4, 4000), 40)
    assert np.mean(np.abs(c.values[1:]) < c.band) >= 0.9


def test_constant_series_is_degenerate():
    with pytest.raises(DegenerateVariance):
        acf(np.ones(50))


def test_bad_lag():
    with pytest.raises(ValueError):
        acf(noise(1, 10), 10)


def test_band_crossing():
    r = np.array([1, 0.9, 0.5, 0.1, 0.3, 0.05, 0.0, 0.01, 0.02, 0.0, 0.0])
    assert band_crossing(r, 0.2, run=3) == 5
    assert band_crossing(r, 0.2, run=8) is None


def test_ar1_correlation_length():
    y = simulate_arma(0.0, [0.8], [], 20_000, 7)
    tau, cross = correlation_length(y)
    assert tau == pytest.approx(-1 / math.log(0.8), rel=0.05)
    assert cross is not None and 5 < cross < 40


def test_correlation_length_of_anticorrelated_series():
    y = np.tile([0.0, 1.0], 50)
    assert correlation_length(y, 10)[0] == 0.0


@given(st.floats(-0.9, 0.9), st.integers(0, 10_000))
def test_acf_is_bounded(phi, seed):
    y = simulate_arma(0.0, [phi], [], 200, seed, burn=50)
    r = acf(y, 20).values
    assert r[0] == 1 and np.all(np.abs(r) <= 1 + 1e-12)


# -- ARMA ---------------------------------------------------------------------

def test_aic_formula():
    assert aic(0.01, 2, 1, 1000) == math.log(0.01) + 6 / 1000
    assert aic(1.0, 0, 0, 50) == 0.0


def test_arma21_self_consistency():
    y = simulate_arma(REF_ARMA["c"], REF_ARMA["ar"], REF_ARMA["ma"], 10_000, 3, sigma=0.01)
    m = fit_arma(y, 2, 1)
    truth = np.r_[REF_ARMA["ar"], REF_ARMA["ma"]]
    est = np.r_[m.ar, m.ma]
    assert np.all(np.abs(est - truth) <= 2 * m.stderr[1:])
    assert m.sigma2 == pytest.approx(1e-4, rel=0.05)
    assert m.significant().all()


def test_arma_agrees_with_statsmodels_mle():
    y = simulate_arma(0.1, [0.6], [0.4], 4000, 11)
    ours = fit_arma(y, 1, 1)
    ref = ARIMA(y, order=(1, 0, 1), trend="c").fit()
    assert ours.ar[0] == pytest.approx(ref.arparams[0], abs=0.02)
    assert ours.ma[0] == pytest.approx(ref.maparams[0], abs=0.02)
    assert ours.c / (1 - ours.ar[0]) == pytest.approx(ref.params[0], abs=0.02)


def test_pure_ar_is_ols():
    y = simulate_arma(0.5, [0.4, 0.2], [], 3000, 2)
    m = fit_arma(y, 2, 0)
    X = np.column_stack([np.ones(2998), y[1:-1], y[:-2]])
    beta = np.linalg.lstsq(X, y[2:], rcond=None)[0]
    assert np.allclose(m.params, beta, atol=1e-10)
    assert m.iterations == 0


def test_arma_too_short():
    with pytest.raises(DomainError):
        fit_arma(noise(1, 40), 2, 1)


def test_arma_iteration_cap():
    y = simulate_arma(0.0, [0.5], [0.5], 2000, 5)
    with pytest.raises(NonConvergence):
        fit_arma(y, 1, 1, max_iter=1, tol=0.0)


def test_nonstationary_fit_warns():
    e = noise(6, 300)
    y = np.empty(300)
    y[0] = 1.0
    for t in range(1, 300):
        y[t] = 1.03 * y[t - 1] + e[t]
    with pytest.warns(NonStationary):
        fit_arma(y, 1, 0)


def test_model_dict_roundtrip_fields():
    m = fit_arma(simulate_arma(0, [0.3], [], 500, 1), 1, 0)
    d = m.to_dict()
    assert d["p"] == 1 and d["q"] == 0 and len(d["stderr"]) == 2


# -- Ljung-Box ------------------------------------------------------------------

@pytest.mark.parametrize("h, df", [(5, 0), (20, 3), (12, 2)])
def test_ljung_box_matches_statsmodels(h, df):
    e = noise(9, 700)
    Q, p = ljung_box(e, h, df)
    ref = acorr_ljungbox(e, lags=[h], model_df=df)
    assert Q == pytest.approx(float(ref["lb_stat"].iloc[0]), rel=1e-10)
    assert p == pytest.approx(float(ref["lb_pvalue"].iloc[0]), rel=1e-8)


def test_ljung_box_pvalue_is_uniform_on_white_noise():
    ps = [ljung_box(noise(s, 500), 10)[1] for s in range(400)]
    assert stats.kstest(ps, "uniform").pvalue > 0.05


def test_ljung_box_rejects_correlated_series():
    y = simulate_arma(0, [0.5], [], 1000, 1)
    assert ljung_box(y, 10)[1] < 1e-6


def test_ljung_box_domain():
    with pytest.raises(DomainError):
        ljung_box(noise(1, 100), 3, 3)
    with pytest.raises(DomainError):
        ljung_box(noise(1, 10), 10)


def test_ljung_box_table_rows():
    rows = ljung_box_table(noise(2, 300), 8, 3)
    assert [h for h, _, _ in rows] == [4, 5, 6, 7, 8]


# -- identification -------------------------------------------------------------

def test_ar3_pacf_cutoff():
    y = simulate_arma(0.0, [0.5, -0.3, 0.3], [], 5000, 8)
    ident = box_jenkins_identify(y, 3, 1)
    assert ident.pacf_cutoff == 3
    assert ident.orders[0][0] == 3


def test_identify_ranks_reference_model_first():
    y = simulate_arma(REF_ARMA["c"], REF_ARMA["ar"], REF_ARMA["ma"], 10_000, 3, sigma=0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ident = box_jenkins_identify(y)
    assert ident.orders[0] == (2, 1)
    aics = [c.aic for c in ident.candidates]
    assert aics == sorted(aics)


# -- random walks ---------------------------------------------------------------

def test_olympus_walk_stays_in_subspace():
    tr = random_walk("olympus", 30, 64, 2, keep_rules=True)
    assert len(tr) == 30 and len(tr.rules) == 30
    assert all(OLYMPUS.contains(r) for r in tr.rules)
    for a, b in zip(tr.rules, tr.rules[1:]):
        assert int((a.bits != b.bits).sum()) == 1


def test_walk_is_reproducible():
    a = random_walk("full", 20, 64, 5)
    b = random_walk("full", 20, 64, 5)
    assert np.array_equal(a.values, b.values)


def test_walk_trace_validation():
    with pytest.raises(ValueError):
        WalkTrace([0.5])
    with pytest.raises(ValueError):
        random_walk("full", 1, 64, 0)
