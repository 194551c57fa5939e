"""Gaussian utilities against closed forms, Monte-Carlo and quadrature oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcpnav.numerics import DiagGaussian, GaussError, gauss_kl, gauss_nll, gauss_reparam_sample, logsumexp


def test_kl_identical_is_zero():
    d = DiagGaussian(np.array([0.3, -0.2]), np.array([0.1, -0.5]))
    assert float(gauss_kl(d, d).value) == pytest.approx(0.0, abs=1e-12)


def test_kl_unit_shift_is_half():
    q = DiagGaussian(np.array([1.0]), np.array([0.0]))
    p = DiagGaussian(np.array([0.0]), np.array([0.0]))
    assert float(gauss_kl(q, p).value) == pytest.approx(0.5)


def test_kl_matches_monte_carlo():
    # E_q[log q - log p] with 1e6 samples agrees within 1%.
    rng = np.random.default_rng(11)
    mq, lq = rng.normal(0, 1, 4), rng.normal(0, 0.5, 4)
    mp_, lp = rng.normal(0, 1, 4), rng.normal(0, 0.5, 4)
    q = DiagGaussian(mq, lq)
    p = DiagGaussian(mp_, lp)
    closed = float(gauss_kl(q, p).value)

    n = 1_000_000
    x = mq + np.exp(0.5 * lq) * rng.normal(0, 1, (n, 4))
    logq = -0.5 * (np.log(2 * np.pi) + lq + (x - mq) ** 2 / np.exp(lq)).sum(axis=1)
    logp = -0.5 * (np.log(2 * np.pi) + lp + (x - mp_) ** 2 / np.exp(lp)).sum(axis=1)
    mc = float(np.mean(logq - logp))
    assert closed == pytest.approx(mc, rel=0.01)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=1, max_size=4),
    st.lists(st.floats(-2, 2), min_size=1, max_size=4),
)
def test_kl_nonnegative(mu, lv):
    dim = min(len(mu), len(lv))
    q = DiagGaussian(np.array(mu[:dim]), np.array(lv[:dim]))
    p = DiagGaussian(np.zeros(dim), np.zeros(dim))
    assert float(gauss_kl(q, p).value) >= -1e-12


def test_kl_dimension_mismatch():
    q = DiagGaussian(np.zeros(2), np.zeros(2))
    p = DiagGaussian(np.zeros(3), np.zeros(3))
    with pytest.raises(GaussError):
        gauss_kl(q, p)


def test_nll_at_mean_unit_variance():
    d = DiagGaussian(np.array([0.7]), np.array([0.0]))
    assert float(gauss_nll(np.array([0.7]), d).value) == pytest.approx(0.5 * np.log(2 * np.pi))


def test_nll_one_sigma_away():
    lv = 0.4
    d = DiagGaussian(np.array([0.0]), np.array([lv]))
    x = np.array([np.exp(0.5 * lv)])
    want = 0.5 * np.log(2 * np.pi) + 0.5 * lv + 0.5
    assert float(gauss_nll(x, d).value) == pytest.approx(want)


def test_nll_density_integrates_to_one():
    # quadrature oracle: exp(-nll) over a fine 1-D grid integrates to 1
    mu, lv = 0.37, -0.8
    d = DiagGaussian(np.array([mu]), np.array([lv]))
    sigma = np.exp(0.5 * lv)
    grid = np.linspace(mu - 10 * sigma, mu + 10 * sigma, 20001)
    dens = np.array([np.exp(-float(gauss_nll(np.array([x]), d).value)) for x in grid])
    integral = np.trapezoid(dens, grid)
    assert integral == pytest.approx(1.0, abs=1e-6)


def test_nll_dimension_mismatch():
    d = DiagGaussian(np.zeros(2), np.zeros(2))
    with pytest.raises(GaussError):
        gauss_nll(np.zeros(3), d)


def test_reparam_zero_noise_returns_mean():
    d = DiagGaussian(np.array([0.2, -0.4]), np.array([1.3, 0.7]))
    out = gauss_reparam_sample(d, np.zeros(2))
    assert np.allclose(out.value, d.mean_value)


def test_reparam_unit_logvar_zero():
    d = DiagGaussian(np.array([0.2, -0.4]), np.zeros(2))
    out = gauss_reparam_sample(d, np.ones(2))
    assert np.allclose(out.value, d.mean_value + 1.0)


def test_reparam_sample_statistics():
    rng = np.random.default_rng(5)
    mu = np.array([0.5, -1.0])
    lv = np.array([0.3, -0.6])
    d = DiagGaussian(mu, lv)
    n = 100_000
    noise = rng.normal(0, 1, (n, 2))
    samples = mu + np.exp(0.5 * lv) * noise  # same map the op applies
    out = gauss_reparam_sample(d, noise)
    assert np.allclose(out.value, samples)
    var = np.exp(lv)
    se_mean = np.sqrt(var / n)
    assert np.all(np.abs(out.value.mean(axis=0) - mu) < 3 * se_mean)
    se_var = var * np.sqrt(2.0 / (n - 1))
    assert np.all(np.abs(out.value.var(axis=0) - var) < 3 * se_var)


def test_reparam_dimension_mismatch():
    d = DiagGaussian(np.zeros(2), np.zeros(2))
    with pytest.raises(GaussError):
        gauss_reparam_sample(d, np.zeros(3))


def test_logsumexp_basics():
    assert logsumexp(np.array([0.0, 0.0])) == pytest.approx(np.log(2))
    assert logsumexp(np.array([-np.inf, 2.5])) == pytest.approx(2.5)
    assert logsumexp(np.array([1000.0, 1000.0])) == pytest.approx(1000 + np.log(2))
    assert logsumexp(np.array([7.0])) == pytest.approx(7.0)
    assert logsumexp(np.array([-np.inf, -np.inf])) == -np.inf
    with pytest.raises(GaussError):
        logsumexp(np.array([]))
