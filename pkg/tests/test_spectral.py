import numpy as np
import pytest

from flafkit import (
    InvalidInputError,
    OverlapSaveBuffer,
    Spectrum,
    filter_spectrum,
    forward,
    gradient_constrain,
    inverse,
    os_convolve,
)


def naive_dft_half(x):
    # O(N^2) direct-summation oracle for the half spectrum
    n = len(x)
    bins = []
    for m in range(n // 2 + 1):
        bins.append(np.sum(x * np.exp(-2j * np.pi * m * np.arange(n) / n)))
    return np.array(bins)


class TestForwardInverse:
    def test_zero_input(self):
        spec = forward(np.zeros(16))
        np.testing.assert_array_equal(spec.bins, 0)

    def test_impulse(self):
        x = np.zeros(16)
        x[0] = 1.0
        np.testing.assert_allclose(forward(x).bins, 1.0 + 0j, atol=1e-15)

    def test_matches_naive_dft(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(16)
        np.testing.assert_allclose(forward(x).bins, naive_dft_half(x), atol=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        for n in (8, 12, 16, 33):
            x = rng.standard_normal(n)
            np.testing.assert_allclose(inverse(forward(x)), x, rtol=1e-12, atol=1e-14)

    def test_real_input_edge_bins(self):
        rng = np.random.default_rng(2)
        spec = forward(rng.standard_normal(32))
        assert spec.bins[0].imag == 0.0
        assert spec.bins[-1].imag == 0.0

    def test_parseval(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(64)
        bins = forward(x).bins
        weights = np.full(bins.size, 2.0)
        weights[0] = 1.0
        weights[-1] = 1.0  # even length: Nyquist counted once
        energy = np.sum(weights * np.abs(bins) ** 2) / 64
        np.testing.assert_allclose(energy, np.sum(x**2), rtol=1e-10)

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            forward(np.zeros(8), n_fft=16)
        with pytest.raises(InvalidInputError):
            Spectrum(np.zeros(4, dtype=complex), n_fft=16)


class TestOsConvolve:
    def test_identity_filter_delays(self):
        buf = OverlapSaveBuffer(filter_len=4, hop=4)
        w = filter_spectrum(np.array([1.0, 0, 0, 0]), buf.n_fft)
        x = np.arange(1.0, 17.0)
        out = np.concatenate([os_convolve(buf, w, x[i:i + 4]) for i in range(0, 16, 4)])
        np.testing.assert_allclose(out, x, atol=1e-12)

    def test_zero_filter(self):
        buf = OverlapSaveBuffer(filter_len=8, hop=8)
        w = filter_spectrum(np.zeros(8), buf.n_fft)
        out = os_convolve(buf, w, np.random.default_rng(0).standard_normal(8))
        np.testing.assert_array_equal(out, 0)

    def test_random_filter_matches_direct(self):
        rng = np.random.default_rng(4)
        h = rng.standard_normal(8)
        x = rng.standard_normal(64)
        buf = OverlapSaveBuffer(filter_len=8, hop=8, n_fft=16)
        w = filter_spectrum(h, 16)
        out = np.concatenate([os_convolve(buf, w, x[i:i + 8]) for i in range(0, 64, 8)])
        np.testing.assert_allclose(out, np.convolve(x, h)[:64], atol=1e-10)

    @pytest.mark.parametrize("m", [1, 4, 8, 16])
    @pytest.mark.parametrize("hop", [1, 4, 8, 16])
    def test_grid_matches_direct(self, m, hop):
        rng = np.random.default_rng(m * 100 + hop)
        h = rng.standard_normal(m)
        n = hop * 16
        x = rng.standard_normal(n)
        buf = OverlapSaveBuffer(filter_len=m, hop=hop)
        w = filter_spectrum(h, buf.n_fft)
        out = np.concatenate(
            [os_convolve(buf, w, x[i:i + hop]) for i in range(0, n, hop)]
        )
        np.testing.assert_allclose(out, np.convolve(x, h)[:n], atol=1e-10)

    def test_size_mismatch(self):
        buf = OverlapSaveBuffer(filter_len=8, hop=8)
        w = filter_spectrum(np.zeros(8), 32)
        with pytest.raises(InvalidInputError):
            os_convolve(buf, w, np.zeros(8))

    def test_history_shifts_by_hop(self):
        buf = OverlapSaveBuffer(filter_len=4, hop=2)
        buf.push(np.array([1.0, 2.0]))
        buf.push(np.array([3.0, 4.0]))
        np.testing.assert_array_equal(buf.history, [0, 0, 1, 2, 3, 4])

    def test_too_small_n_fft_rejected(self):
        with pytest.raises(InvalidInputError):
            OverlapSaveBuffer(filter_len=8, hop=8, n_fft=12)


class TestGradientConstrain:
    def test_zeroes_tail(self):
        rng = np.random.default_rng(5)
        t = rng.standard_normal(16)
        spec = forward(t)
        out = gradient_constrain(spec, keep=5)
        back = inverse(out)
        np.testing.assert_allclose(back[:5], t[:5], atol=1e-12)
        np.testing.assert_allclose(back[5:], 0, atol=1e-14)

    def test_idempotent(self):
        rng = np.random.default_rng(6)
        spec = forward(rng.standard_normal(32))
        once = gradient_constrain(spec, keep=10)
        twice = gradient_constrain(once, keep=10)
        np.testing.assert_allclose(once.bins, twice.bins, atol=1e-12)

    def test_keep_full_is_identity(self):
        rng = np.random.default_rng(7)
        spec = forward(rng.standard_normal(16))
        out = gradient_constrain(spec, keep=16)
        np.testing.assert_allclose(out.bins, spec.bins, atol=1e-14)

    def test_already_constrained_unchanged(self):
        w = filter_spectrum(np.random.default_rng(8).standard_normal(6), 16)
        out = gradient_constrain(w, keep=6)
        np.testing.assert_allclose(out.bins, w.bins, atol=1e-12)

    def test_keep_beyond_n_fft_rejected(self):
        with pytest.raises(InvalidInputError):
            gradient_constrain(forward(np.zeros(8)), keep=9)
