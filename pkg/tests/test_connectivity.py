import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unmixio import (
    EpochedSeries,
    SingularMatrixError,
    SpectralConnectivity,
    VarModel,
    coherence_squared,
    envelope_correlation,
    fit_var,
    hilbert_envelope,
    icoh,
    lag_zero_correlation,
)
from unmixio.generators import AR5_TRUE_EDGES
from oracles import analytic_signal, stable_var

FREQS = np.arange(1, 128)


def test_reference_correlations(var5):
    r = lag_zero_correlation(var5)
    assert r[0, 1] == pytest.approx(-0.831, abs=0.03)
    assert r[1, 2] == pytest.approx(0.396, abs=0.03)


def test_duplicate_channel_correlation(rng):
    x = rng.normal(size=100)
    assert lag_zero_correlation(np.column_stack([x, x]))[0, 1] == 1.0


def test_zero_variance_names_channel(rng):
    x = np.column_stack([rng.normal(size=20), np.full(20, 3.0)])
    with pytest.raises(ValueError, match="channel 2"):
        lag_zero_correlation(x)


def test_icoh_hand_value():
    model = VarModel(np.array([[[0.5, 0.0], [0.3, 0.5]]]), np.eye(2), 1000)
    v = icoh(model, [64.0], 256.0).values[0]
    # Abar = I + iA at a quarter of the sampling rate
    a21, a22 = abs(0.3j) ** 2, abs(1 + 0.5j) ** 2
    assert v[1, 0] == pytest.approx(a21 / (a21 + a22), abs=1e-14)
    assert v[1, 0] == pytest.approx(9 / 134, abs=1e-14)
    assert v[0, 1] == 0.0
    assert v[0, 0] == v[1, 1] == 0.0


def test_icoh_uses_precision_diagonal():
    s = np.array([[2.0, 0.5], [0.5, 1.0]])
    p = np.linalg.inv(s)
    model = VarModel(np.array([[[0.5, 0.0], [0.3, 0.5]]]), s, 1000)
    v = icoh(model, [64.0], 256.0).values[0]
    num = p[1, 1] * 0.09
    assert v[1, 0] == pytest.approx(num / (num + p[0, 0] * 1.25), abs=1e-14)


def test_icoh_diagonal_var_is_zero(rng):
    coefs = np.stack([np.diag(rng.uniform(-0.5, 0.5, 4)) for _ in range(3)])
    model = VarModel(coefs, np.diag(rng.uniform(0.5, 2, 4)), 1000)
    assert np.all(icoh(model, FREQS, 256.0).values == 0.0)


def test_icoh_singular_covariance():
    model = VarModel(np.zeros((1, 2, 2)), np.ones((2, 2)), 10)
    with pytest.raises(SingularMatrixError):
        icoh(model, [1.0], 256.0)


def test_icoh_permutation_invariance(rng):
    coefs = stable_var(rng, 4, 2)
    w = rng.normal(size=(4, 4))
    model = VarModel(coefs, w @ w.T + np.eye(4), 100)
    perm = rng.permutation(4)
    pm = VarModel(coefs[:, perm][:, :, perm], model.sigma[perm][:, perm], 100)
    a = icoh(model, FREQS, 256.0).values
    b = icoh(pm, FREQS, 256.0).values
    np.testing.assert_allclose(b, a[:, perm][:, :, perm], atol=1e-14)


def test_icoh_var5_structure(var5):
    peak = icoh(fit_var(var5, 2)[0], FREQS, 256.0).peak()
    for i in range(5):
        for j in range(5):
            if i == j:
                continue
            if (i, j) in AR5_TRUE_EDGES:
                assert peak[i, j] > 0.5, (i, j)
            else:
                assert peak[i, j] < 0.1, (i, j)


def test_spectral_values_validated():
    with pytest.raises(ValueError):
        SpectralConnectivity(np.array([1.0]), "icoh", np.full((1, 2, 2), 1.5))


def test_rows_are_one_based_off_diagonal():
    sc = SpectralConnectivity(np.array([5.0]), "icoh", np.array([[[0.0, 0.2], [0.7, 0.0]]]))
    assert list(sc.rows()) == [(5.0, 2, 1, 0.2), (5.0, 1, 2, 0.7)]


def test_oscillator_coherence_peak(oscillators):
    coh = coherence_squared(oscillators, (1, 30))
    c12 = coh.curve(0, 1)
    at10 = c12[coh.freqs == 10][0]
    at20 = c12[coh.freqs == 20][0]
    assert at10 > 0.5
    assert at10 > 5 * at20
    assert np.all((coh.values >= 0) & (coh.values <= 1))
    assert np.allclose(coh.values, np.swapaxes(coh.values, 1, 2))


def test_coherence_duplicate_channel(rng):
    x = rng.normal(size=(20, 64, 1))
    e = EpochedSeries(np.concatenate([x, x], axis=2), 64.0)
    np.testing.assert_allclose(coherence_squared(e).values, 1.0, atol=1e-12)


def test_coherence_scale_invariance(rng):
    x = rng.normal(size=(30, 64, 3))
    a = coherence_squared(EpochedSeries(x, 64.0)).values
    b = coherence_squared(EpochedSeries(x * [2.0, 1.0, 0.25], 64.0)).values
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_coherence_needs_two_epochs(rng):
    with pytest.raises(ValueError, match="two epochs"):
        coherence_squared(EpochedSeries(rng.normal(size=(1, 64, 2)), 64.0))


def test_coherence_bin_grid(rng):
    e = EpochedSeries(rng.normal(size=(4, 256, 2)), 256.0)
    np.testing.assert_array_equal(coherence_squared(e, (1, 30)).freqs, np.arange(1, 31))


def test_white_noise_coherence_bias():
    k = 100
    x = np.random.default_rng(0).normal(size=(k, 256, 2))
    c = coherence_squared(EpochedSeries(x, 256.0)).curve(0, 1)
    # inner bins follow Beta(1, K-1): mean 1/K, P(c > 0.05) = 0.95**(K-1)
    inner = c[1:-1]
    assert inner.mean() == pytest.approx(1 / k, abs=0.003)
    assert np.mean(inner > 0.05) <= 0.03
    assert np.max(inner) < 0.1


def test_envelope_matches_oracle(rng):
    for n in (64, 65):
        x = rng.normal(size=n)
        np.testing.assert_allclose(hilbert_envelope(x), np.abs(analytic_signal(x)), atol=1e-12)


def test_envelope_sinusoid_amplitude_two():
    t = np.arange(1000)
    env = hilbert_envelope(2 * np.sin(2 * np.pi * 50 / 1000 * t + 0.3))
    np.testing.assert_allclose(env[50:-50], 2.0, rtol=0.01)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.3, np.pi - 0.3), st.floats(0, 2 * np.pi))
def test_envelope_constant_for_sinusoid(a, w, phi):
    n = 4096
    env = hilbert_envelope(a * np.sin(w * np.arange(n) + phi))
    k = n // 20
    np.testing.assert_allclose(env[k:-k], a, rtol=0.01)


def test_envelope_zero_and_nonnegative(rng):
    assert np.all(hilbert_envelope(np.zeros(16)) == 0.0)
    assert np.all(hilbert_envelope(rng.normal(size=(50, 3))) >= 0)
    with pytest.raises(ValueError):
        hilbert_envelope(np.ones(3))


def test_envelope_tracks_truth(ampmod):
    signals, truth = ampmod
    env = hilbert_envelope(signals)
    k = int(0.02 * len(env))
    r = np.corrcoef(env[k:-k, 0], truth[k:-k, 0])[0, 1]
    assert r > 0.9


def test_envelope_correlation_raw_ampmod(ampmod):
    r = envelope_correlation(ampmod[0])
    assert np.max(np.abs(r - np.eye(3))) < 0.02


def test_envelope_correlation_trims_edges(rng):
    x = rng.normal(size=(1000, 2))
    env = hilbert_envelope(x)[20:-20]
    np.testing.assert_allclose(envelope_correlation(x), lag_zero_correlation(env), atol=1e-15)
