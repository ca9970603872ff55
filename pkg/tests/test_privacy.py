import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transnet.netgen import SbmSpec, balanced_labels, generate_sbm
from transnet.privacy import (
    DebiasedNetwork,
    PrivacyParams,
    debias,
    epsilon_to_q,
    q_to_epsilon,
    randomized_response,
)

LN19 = 2.9444389791664403


@pytest.fixture(scope="module")
def net50():
    spec = SbmSpec.from_labels(balanced_labels(50, 2), np.array([[0.4, 0.1], [0.1, 0.4]]))
    return generate_sbm(spec, seed=123)


def test_identity_when_no_noise(net50):
    out = randomized_response(net50, PrivacyParams(1, 1), seed=0)
    assert np.array_equal(out.adj, net50.adj)


def test_fair_coin_density(net50):
    dens = np.array([randomized_response(net50, PrivacyParams(0.5, 0.5), seed=s).density() for s in range(500)])
    assert abs(dens.mean() - 0.5) < 3 * dens.std(ddof=1) / np.sqrt(500)


def test_flip_rates(net50):
    iu = np.triu_indices(50, 1)
    a = net50.adj[iu]
    ones, zeros = a == 1, a == 0
    keep1, keep0 = [], []
    for s in range(500):
        out = randomized_response(net50, PrivacyParams(0.9, 0.8), seed=s).adj[iu]
        keep1.append(out[ones].mean())
        keep0.append(out[zeros].mean() * -1 + 1)
    for rates, target in ((np.array(keep1), 0.9), (np.array(keep0), 0.8)):
        assert abs(rates.mean() - target) < 3 * rates.std(ddof=1) / np.sqrt(rates.size)


def test_rr_output_valid(net50):
    out = randomized_response(net50, PrivacyParams(0.7, 0.6), seed=1)
    assert np.array_equal(out.adj, out.adj.T)
    assert not out.adj.diagonal().any()
    assert set(np.unique(out.adj)) <= {0, 1}


def test_debias_identity_without_noise(net50):
    out = debias(net50, PrivacyParams(1, 1))
    assert np.array_equal(out.mat, net50.adj.astype(float))


def test_debias_values():
    a = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.int8)
    out = debias(a, PrivacyParams(0.9, 0.9)).mat
    assert out[0, 1] == pytest.approx(1.125, abs=1e-15)
    assert out[0, 2] == pytest.approx(-0.125, abs=1e-15)
    assert np.all(out.diagonal() == 0.0)
    off = out[~np.eye(3, dtype=bool)]
    assert set(np.round(off, 12)) <= {1.125, -0.125}


def test_debias_rejects_nonpositive_scale(net50):
    with pytest.raises(ValueError, match="q \\+ q' > 1"):
        debias(net50, PrivacyParams(0.5, 0.5))
    with pytest.raises(ValueError):
        debias(net50, PrivacyParams(0.3, 0.6))


def unbiasedness_z(net, params, draws=1000):
    """Per-entry z-scores of the Monte Carlo mean of debias(RR(A)) against A."""
    iu = np.triu_indices(net.n, 1)
    vals = np.stack([debias(randomized_response(net, params, seed=s), params).mat[iu] for s in range(draws)])
    se = vals.std(axis=0, ddof=1) / np.sqrt(draws)
    return (vals.mean(axis=0) - net.adj[iu]) / se


# two-sided 3-SE family-wise level (0.27%) spread over the 1225 pairs of a 50-node network
BONFERRONI_Z_1225 = 4.7338


def test_debias_is_conditionally_unbiased(net50):
    z = unbiasedness_z(net50, PrivacyParams(0.8, 0.8))
    assert np.mean(np.abs(z) > 3) <= 0.01
    assert np.abs(z).max() < BONFERRONI_Z_1225


def test_unbiasedness_check_detects_bias(net50):
    # feeding the released matrix as if q = q' = 1 skips the correction
    params = PrivacyParams(0.8, 0.8)
    iu = np.triu_indices(50, 1)
    vals = np.stack([randomized_response(net50, params, seed=s).adj[iu] for s in range(200)]).astype(float)
    z = (vals.mean(0) - net50.adj[iu]) / (vals.std(0, ddof=1) / np.sqrt(200))
    assert np.mean(np.abs(z) > 3) > 0.5


def test_mean_debiased_density_matches_true(net50):
    params = PrivacyParams(0.85, 0.85)
    off = ~np.eye(50, dtype=bool)
    vals = np.array([debias(randomized_response(net50, params, seed=s), params).mat[off].mean()
                     for s in range(300)])
    assert abs(vals.mean() - net50.density()) < 3 * vals.std(ddof=1) / np.sqrt(300)


def test_epsilon_to_q_values_and_limits():
    assert epsilon_to_q(math.log(19)).q == pytest.approx(0.95, abs=1e-15)
    assert epsilon_to_q(1e-9).q == pytest.approx(0.5, abs=1e-9)
    assert epsilon_to_q(50).q == pytest.approx(1.0, abs=1e-15)
    p = epsilon_to_q(2.0)
    assert p.q == p.q_prime
    for bad in (0, -1):
        with pytest.raises(ValueError):
            epsilon_to_q(bad)


def test_q_to_epsilon_values():
    assert q_to_epsilon(PrivacyParams(0.5, 0.5)) == 0.0
    assert abs(q_to_epsilon(PrivacyParams(0.95, 0.95)) - LN19) < 1e-12


def test_q_to_epsilon_undefined():
    with pytest.raises(ValueError, match="zero denominator"):
        q_to_epsilon(PrivacyParams(1, 1))
    with pytest.raises(ValueError):
        q_to_epsilon(PrivacyParams(1, 0.9))


@pytest.mark.parametrize("eps", [0.5, 1.0, 3.0])
def test_epsilon_roundtrip(eps):
    assert abs(q_to_epsilon(epsilon_to_q(eps)) - eps) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 10), st.floats(0.01, 10))
def test_epsilon_to_q_monotone(e1, e2):
    lo, hi = sorted((e1, e2))
    if hi - lo > 1e-9:
        assert epsilon_to_q(lo).q < epsilon_to_q(hi).q


@settings(max_examples=50, deadline=None)
@given(st.floats(0.51, 0.99), st.floats(0.51, 0.99))
def test_q_to_epsilon_monotone_symmetric(q1, q2):
    lo, hi = sorted((q1, q2))
    if hi - lo > 1e-9:
        assert q_to_epsilon(PrivacyParams(lo, lo)) < q_to_epsilon(PrivacyParams(hi, hi))


def test_params_validation():
    with pytest.raises(ValueError):
        PrivacyParams(1.2, 0.9)
    assert PrivacyParams.symmetric(0.9) == PrivacyParams(0.9, 0.9)
    assert isinstance(debias(np.zeros((3, 3), dtype=np.int8), PrivacyParams(0.9, 0.9)), DebiasedNetwork)
