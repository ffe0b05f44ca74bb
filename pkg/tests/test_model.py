import configparser
import math

import numpy as np
import pytest
from scipy import stats

from tvpgar.errors import ConfigError, ShapeError
from tvpgar.model import (
    ShrinkageBlockConfig,
    SvPriorConfig,
    TripleGammaConfig,
    TvpSvModelSpec,
    centered_states,
    fitted_mean,
    initial_parameters,
    log_likelihood,
    model_spec_from_config,
    model_spec_to_config,
    normalize_states,
)


def random_params(rng, T=7, K=3):
    p = initial_parameters(TvpSvModelSpec(K=K), T)
    p.beta0 = rng.standard_normal(K)
    p.sqrt_v = rng.standard_normal(K)
    p.states_tilde = rng.standard_normal((T, K)).cumsum(axis=0)
    p.log_vol = rng.standard_normal(T)
    return p


def test_zero_scales_give_constant_coefficients(rng):
    p = random_params(rng)
    p.sqrt_v = np.zeros(3)
    np.testing.assert_array_equal(centered_states(p), np.tile(p.beta0, (p.T, 1)))


def test_identity_map(rng):
    p = random_params(rng)
    p.beta0 = np.zeros(3)
    p.sqrt_v = np.ones(3)
    np.testing.assert_array_equal(centered_states(p), p.states_tilde)


def test_normalize_roundtrip(rng):
    for _ in range(20):
        p = random_params(rng)
        back = normalize_states(centered_states(p), p.beta0, p.sqrt_v)
        np.testing.assert_allclose(back, p.states_tilde, atol=1e-12 * max(1.0, np.abs(p.states_tilde).max()) / np.abs(p.sqrt_v).min())


def test_likelihood_single_exact_point():
    p = initial_parameters(TvpSvModelSpec(K=1), 1)
    p.beta0 = np.array([2.0])
    p.sqrt_v = np.zeros(1)
    p.log_vol = np.zeros(1)
    assert log_likelihood(p, (np.array([2.0]), np.ones((1, 1)))) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)


def test_likelihood_additive(rng):
    p = random_params(rng, T=2, K=2)
    y = rng.standard_normal(2)
    X = rng.standard_normal((2, 2))
    total = log_likelihood(p, (y, X))
    parts = 0.0
    for t in range(2):
        q = p.copy()
        q.states_tilde = p.states_tilde[t : t + 1]
        q.log_vol = p.log_vol[t : t + 1]
        parts += log_likelihood(q, (y[t : t + 1], X[t : t + 1]))
    assert total == pytest.approx(parts, abs=1e-12)


def test_likelihood_matches_pointwise_oracle(rng):
    for _ in range(10):
        p = random_params(rng, T=15, K=3)
        X = rng.standard_normal((15, 3))
        y = rng.standard_normal(15) * 2
        beta = p.beta0 + p.sqrt_v * p.states_tilde
        oracle = sum(stats.norm.logpdf(y[t], beta[t] @ X[t], math.exp(0.5 * p.log_vol[t])) for t in range(15))
        assert log_likelihood(p, (y, X)) == pytest.approx(oracle, abs=1e-12 * max(1.0, abs(oracle)))


def test_likelihood_shape_check(rng):
    p = random_params(rng)
    with pytest.raises(ShapeError):
        log_likelihood(p, (np.zeros(3), np.zeros((3, 3))))


def test_fitted_mean(rng):
    p = random_params(rng)
    X = rng.standard_normal((p.T, p.K))
    np.testing.assert_allclose(fitted_mean(p, X), np.sum(centered_states(p) * X, axis=1))


def test_validate(rng):
    p = random_params(rng)
    p.validate()
    q = p.copy()
    q.tau2_v = -q.tau2_v
    with pytest.raises(ShapeError):
        q.validate()
    q = p.copy()
    q.rho_sigma = 1.0
    with pytest.raises(ShapeError):
        q.validate()


def test_copy_is_deep(rng):
    p = random_params(rng)
    q = p.copy()
    q.beta0[0] = 99.0
    assert p.beta0[0] != 99.0


def test_config_validation():
    with pytest.raises(ConfigError):
        SvPriorConfig(mu_prior_var=0.0)
    with pytest.raises(ConfigError):
        ShrinkageBlockConfig(a=0.7)
    ShrinkageBlockConfig(a=0.7, learn_a=False)
    with pytest.raises(ConfigError):
        TvpSvModelSpec(K=0)


def test_config_roundtrip():
    spec = TvpSvModelSpec(horizon=4, K=5, sv=SvPriorConfig(mu_prior_var=10.0), shrinkage=TripleGammaConfig.fixed(0.3, 0.2, 5.0))
    cp = model_spec_to_config(spec)
    text = configparser.ConfigParser()
    text.read_dict({s: dict(cp[s]) for s in cp.sections()})
    assert model_spec_from_config(text, horizon=4, K=5) == spec


def test_config_bad_value():
    cp = configparser.ConfigParser()
    cp.read_dict({"sv": {"mu_prior_var": "abc"}})
    with pytest.raises(ConfigError):
        model_spec_from_config(cp)
