import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lff import filterbank as fb
from lff.errors import ConfigError, ShapeError
from lff.filterbank import FilterBankParams, FilterShape
from lff.stft import compute_spectrum
from gradcheck import filterbank_gradient_errors
from oracles import naive_filterbank, reference_log_mel, reference_mel_matrix, rel_err


def _params(alphas, betas, shape="triangle", n_bins=16):
    return FilterBankParams(np.array(alphas, float), np.array(betas, float), FilterShape(shape), n_bins)


class TestFilterResponse:
    def test_peaks(self):
        assert fb.filter_response("triangle", 7.3, 3.0, 7.3) == 1.0
        assert fb.filter_response("bell", 7.3, 3.0, 7.3) == 1.0

    def test_triangle_cutoff(self):
        assert fb.filter_response("triangle", 10.0, 4.0, 12.0) == 0.0
        assert fb.filter_response("triangle", 10.0, 4.0, 13.0) == 0.0

    def test_bell_one_sigma(self):
        assert fb.filter_response("bell", 100.0, 10.0, 110.0) == pytest.approx(0.6065306597126334, abs=1e-15)

    @given(st.sampled_from(["triangle", "bell"]), st.floats(0, 50), st.floats(0.5, 30), st.floats(-10, 60))
    def test_range(self, shape, a, b, n):
        v = fb.filter_response(shape, a, b, n)
        assert 0.0 <= v <= 1.0


class TestWeightMatrix:
    def test_single_triangle_column(self):
        W = fb.build_weight_matrix(_params([5.0], [4.0], n_bins=11))
        expected = np.zeros(11)
        expected[[4, 5, 6]] = [0.5, 1.0, 0.5]
        np.testing.assert_array_equal(W[:, 0], expected)

    @pytest.mark.parametrize("beta", [2.0, 5.0, 12.5])
    def test_bell_column_sum(self, beta):
        W = fb.build_weight_matrix(_params([100.3], [beta], "bell", n_bins=256))
        assert W[:, 0].sum() == pytest.approx(beta * math.sqrt(2 * math.pi), rel=0.01)

    def test_mel_init_matches_reference_matrix(self):
        W = fb.build_weight_matrix(fb.mel_init(64, 512, 16000))
        assert np.max(np.abs(W - reference_mel_matrix(64, 512, 16000))) < 1e-9

    @pytest.mark.parametrize("m,n,sr", [(40, 257, 16000), (24, 512, 8000), (80, 1024, 22050)])
    def test_mel_init_reference_other_grids(self, m, n, sr):
        W = fb.build_weight_matrix(fb.mel_init(m, n, sr))
        assert np.max(np.abs(W - reference_mel_matrix(m, n, sr))) < 1e-9


class TestForward:
    def test_zero_spectrum_floor(self):
        out = fb.forward(np.zeros((3, 16)), _params([3.0, 9.0], [4.0, 6.0])).values
        np.testing.assert_array_equal(out, np.full((3, 2), 10 * np.log10(1e-10)))

    def test_single_bin_peak(self):
        s = np.zeros((1, 16))
        s[0, 6] = 2.5
        out = fb.forward(s, _params([6.0, 11.0], [4.0, 4.0])).values
        assert out[0, 0] == pytest.approx(10 * math.log10(2.5 + 1e-10), abs=1e-12)

    @pytest.mark.parametrize("shape", ["triangle", "bell"])
    def test_against_naive_loop(self, shape):
        rng = np.random.default_rng(11)
        s = rng.random((8, 16)) * 3
        p = _params(rng.uniform(1, 14, 4), rng.uniform(1, 8, 4), shape)
        got = fb.forward(s, p).values
        want = naive_filterbank(s, fb.build_weight_matrix(p))
        assert np.max(rel_err(got, want)) < 1e-9

    def test_frozen_mel_against_reference_pipeline(self):
        rng = np.random.default_rng(3)
        s = rng.random((20, 512)) ** 4
        got = fb.forward(s, fb.mel_init(64, 512, 16000)).values
        assert np.max(np.abs(got - reference_log_mel(s, 64, 16000))) < 1e-6

    def test_snapshot_is_a_copy(self):
        p = _params([3.0], [4.0])
        fm = fb.forward(np.ones((2, 16)), p)
        p.alphas[0] = 9.0
        assert fm.params_snapshot.alphas[0] == 3.0

    def test_keeps_stft_config(self):
        spec = compute_spectrum(np.random.default_rng(0).standard_normal(800))
        assert fb.forward(spec, fb.mel_init(8, 512, 16000)).stft == spec.config

    def test_bin_mismatch(self):
        with pytest.raises(ShapeError):
            fb.forward(np.zeros((2, 15)), _params([3.0], [4.0]))


class TestBackward:
    def test_zero_upstream(self):
        p = _params([4.0, 8.0], [3.0, 5.0], "bell")
        grads = fb.backward(np.random.default_rng(0).random((3, 16)), p, np.zeros((3, 2)))
        assert np.all(grads.d_alpha == 0) and np.all(grads.d_beta == 0)

    def test_bell_symmetric_peak(self):
        s = np.zeros((1, 16))
        s[0, 7] = 1.0
        grads = fb.backward(s, _params([7.0, 3.0], [2.0, 2.0], "bell"), np.ones((1, 2)))
        assert grads.d_alpha[0] == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_bell_finite_difference(self, seed):
        assert np.max(filterbank_gradient_errors("bell", seed)) < 1e-4

    @pytest.mark.parametrize("seed", range(10))
    def test_triangle_finite_difference(self, seed):
        assert np.max(filterbank_gradient_errors("triangle", seed)) < 1e-4

    def test_batched_matches_sum(self):
        rng = np.random.default_rng(4)
        s = rng.random((2, 5, 16))
        g = rng.standard_normal((2, 5, 2))
        p = _params([4.2, 9.7], [3.3, 4.1], "bell")
        both = fb.backward(s, p, g)
        a, b = fb.backward(s[0], p, g[0]), fb.backward(s[1], p, g[1])
        np.testing.assert_allclose(both.d_alpha, a.d_alpha + b.d_alpha, rtol=1e-12)
        np.testing.assert_allclose(both.d_beta, a.d_beta + b.d_beta, rtol=1e-12)

    def test_gradient_shape_check(self):
        with pytest.raises(ShapeError):
            fb.backward(np.zeros((3, 16)), _params([3.0], [4.0]), np.zeros((3, 2)))


class TestMelInit:
    def test_mel_of_1000(self):
        assert float(fb.hz_to_mel(1000.0)) == pytest.approx(999.9855371396244, abs=1e-9)

    def test_mel_round_trip(self):
        f = np.linspace(0, 8000, 33)
        np.testing.assert_allclose(fb.mel_to_hz(fb.hz_to_mel(f)), f, atol=1e-9)

    def test_default_layout(self):
        p = fb.mel_init(64, 512, 16000)
        assert np.all(np.diff(p.alphas) > 0)
        assert np.all(p.betas > 0)
        assert p.alphas[-1] < 511

    def test_bell_width(self):
        t = fb.mel_init(32, 512, 16000, "triangle")
        b = fb.mel_init(32, 512, 16000, "bell")
        np.testing.assert_array_equal(t.alphas, b.alphas)
        np.testing.assert_allclose(b.betas, t.betas / 4)

    def test_too_narrow(self):
        with pytest.raises(ConfigError):
            fb.mel_init(400, 64, 16000)


class TestProjection:
    def test_negative_beta(self):
        assert fb.project_params(_params([3.0], [-3.0])).betas[0] == fb.BETA_MIN

    def test_alpha_clamp(self):
        assert fb.project_params(_params([26.0], [3.0])).alphas[0] == 15.0

    def test_valid_unchanged(self):
        p = fb.mel_init(16, 512, 16000)
        q = fb.project_params(p)
        assert q.alphas.tobytes() == p.alphas.tobytes()
        assert q.betas.tobytes() == p.betas.tobytes()


class TestSerialization:
    def test_json_round_trip(self):
        p = fb.mel_init(10, 512, 16000, "bell")
        q = FilterBankParams.from_json(p.to_json())
        assert q.shape == p.shape and q.n_bins == p.n_bins
        assert q.alphas.tobytes() == p.alphas.tobytes()
        assert q.betas.tobytes() == p.betas.tobytes()

    def test_feature_bytes_header(self):
        spec = compute_spectrum(np.random.default_rng(0).standard_normal(1200))
        blob = fb.forward(spec, fb.mel_init(8, 512, 16000)).to_bytes()
        assert blob[:4] == b"LFFM"
