import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from accelmag.temporal import (
    acceleration_filter,
    convolve_time,
    ideal_bandpass,
    log_kernel,
    sigma_from_frequency,
    stft_bandpass,
    stft_fir_taps,
    unwrap_phase,
)


@pytest.mark.parametrize(
    "fps,freq,expected",
    [
        (1000.0, 60.0, 2.95),
        (480.0, 20.0, 4.24),
        (60.0, 2.0, 5.30),
        (30.0, 5.0, 1.06),
    ],
)
def test_sigma_from_frequency_reference_rows(fps, freq, expected):
    assert sigma_from_frequency(fps, freq) == pytest.approx(expected, abs=0.005)


def test_sigma_from_frequency_validates():
    with pytest.raises(ValueError):
        sigma_from_frequency(0.0, 2.0)
    with pytest.raises(ValueError):
        sigma_from_frequency(30.0, -1.0)


def test_log_kernel_moments_and_symmetry():
    for sigma in (0.8, 1.0, 2.12, 5.30, 8.0):
        k = log_kernel(sigma)
        offsets = np.arange(len(k), dtype=float) - k.center
        assert abs(k.taps.sum()) < 1e-15
        assert abs(np.dot(k.taps, offsets)) < 1e-12
        assert np.array_equal(k.taps, k.taps[::-1])
        assert len(k) == 2 * int(np.ceil(4 * sigma)) + 1


def test_log_kernel_degenerate_sigma():
    with pytest.raises(ValueError):
        log_kernel(0.5)
    with pytest.raises(ValueError):
        log_kernel(0.0)


def test_constant_series_annihilated_everywhere():
    k = log_kernel(3.0)
    out = convolve_time(np.full(100, 4.2), k)
    assert np.abs(out).max() < 1e-12


def test_linear_ramp_annihilated_interior():
    k = log_kernel(3.0)
    t = np.arange(100, dtype=float)
    out = convolve_time(5.0 - 0.3 * t, k)
    interior = out[k.center : 100 - k.center]
    assert np.abs(interior).max() < 1e-10


def test_quadratic_gives_second_derivative():
    k = log_kernel(2.0)
    t = np.arange(120, dtype=float)
    out = convolve_time(t**2, k)
    interior = out[k.center : 120 - k.center]
    assert np.abs(interior - 2.0).max() < 1e-3


def test_sinusoid_gain_matches_analytic_transform():
    # transform of the sampled second Gaussian derivative at frequency f
    sigma = 4.0
    k = log_kernel(sigma)
    t = np.arange(2000, dtype=float)
    for f_sigma in (0.05, 0.1, 0.2, 0.3):
        f = f_sigma / sigma  # cycles per sample
        series = np.sin(2 * np.pi * f * t)
        out = convolve_time(series, k)
        gain = -((2 * np.pi * f) ** 2) * np.exp(-2 * np.pi**2 * f**2 * sigma**2)
        interior = slice(k.center, len(t) - k.center)
        assert np.abs(out[interior] - gain * series[interior]).max() < 0.01 * abs(gain)


def test_convolution_identity_on_delta():
    k = log_kernel(1.5)
    series = np.zeros(41)
    series[20] = 1.0
    out = convolve_time(series, k)
    assert np.allclose(out[20 - k.center : 20 + k.center + 1], k.taps, atol=1e-15)


def test_zero_series():
    k = log_kernel(2.0)
    assert np.all(convolve_time(np.zeros(50), k) == 0.0)


def test_series_shorter_than_kernel_errors():
    k = log_kernel(5.0)
    with pytest.raises(ValueError, match="shorter"):
        convolve_time(np.zeros(10), k)


def test_unknown_boundary_errors():
    with pytest.raises(ValueError, match="boundary"):
        convolve_time(np.zeros(50), log_kernel(2.0), boundary="wrap")


def test_scale_monotonicity_of_peak_frequency():
    peaks = []
    for sigma in (1.0, 2.0, 4.0, 8.0):
        taps = log_kernel(sigma).taps
        spectrum = np.abs(np.fft.rfft(taps, n=8192))
        freqs = np.fft.rfftfreq(8192)
        peaks.append(freqs[np.argmax(spectrum)])
    assert all(a > b for a, b in zip(peaks, peaks[1:]))


def test_acceleration_filter_scaling_and_annihilation():
    sigma = 2.5
    t = np.arange(80, dtype=float)
    k = log_kernel(sigma)
    base = convolve_time(np.sin(0.3 * t), k)
    scaled = acceleration_filter(np.sin(0.3 * t), sigma)
    assert np.allclose(scaled, -(sigma**2) * base, rtol=1e-13)
    ramp = acceleration_filter(1.0 + 2.0 * t, sigma)
    assert np.abs(ramp[k.center : 80 - k.center]).max() < 1e-9


# ---------------------------------------------------------------------------
# phase unwrapping


def test_unwrap_corrects_single_jump():
    out = unwrap_phase(np.array([np.pi - 0.1, -np.pi + 0.1]))
    assert out == pytest.approx([np.pi - 0.1, np.pi + 0.1])


def test_unwrap_leaves_smooth_series():
    series = 0.5 * np.sin(np.linspace(0, 6, 50))
    assert np.array_equal(unwrap_phase(series), series)


def test_unwrap_recovers_linear_phase():
    t = np.arange(200, dtype=float)
    true = 0.4 * t
    wrapped = np.angle(np.exp(1j * true))
    recovered = unwrap_phase(wrapped)
    assert np.abs(recovered - true).max() < 1e-9


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-50.0, max_value=50.0, allow_nan=False),
        min_size=2,
        max_size=60,
    )
)
def test_unwrap_congruence_and_step_bound(values):
    series = np.array(values)
    out = unwrap_phase(series)
    assert out[0] == series[0]
    two_pi = 2 * np.pi
    residue = (out - series + np.pi) % two_pi - np.pi
    assert np.abs(residue).max() < 1e-9
    assert np.abs(np.diff(out)).max() <= np.pi + 1e-9


# ---------------------------------------------------------------------------
# bandpass filters


def test_ideal_bandpass_passes_whole_cycle_sinusoid():
    t = np.arange(120, dtype=float)
    series = np.sin(2 * np.pi * 2.0 * t / 60.0)
    out = ideal_bandpass(series, 1.5, 2.5, 60.0)
    assert np.abs(out - series).max() < 1e-9


def test_ideal_bandpass_removes_constant():
    out = ideal_bandpass(np.full(90, 3.3), 1.5, 2.5, 60.0)
    assert np.abs(out).max() < 1e-9


def test_ideal_bandpass_selects_component():
    t = np.arange(120, dtype=float)
    one = np.sin(2 * np.pi * 1.0 * t / 60.0)
    two = np.sin(2 * np.pi * 2.0 * t / 60.0)
    out = ideal_bandpass(one + two, 1.5, 2.5, 60.0)
    assert np.abs(out - two).max() < 1e-9


def test_ideal_bandpass_validates_band():
    with pytest.raises(ValueError):
        ideal_bandpass(np.zeros(50), 2.5, 1.5, 60.0)
    with pytest.raises(ValueError):
        ideal_bandpass(np.zeros(50), 1.0, 40.0, 60.0)
    with pytest.raises(ValueError):
        ideal_bandpass(np.zeros(50), -1.0, 2.0, 60.0)


def _stft_bruteforce(series, window_len, f_lo, f_hi, fps):
    half = window_len // 2
    padded = np.pad(series, half, mode="edge")
    freqs = np.fft.fftfreq(window_len, d=1.0 / fps)
    mask = (np.abs(freqs) >= f_lo) & (np.abs(freqs) <= f_hi)
    out = np.empty_like(series)
    for i in range(len(series)):
        window = padded[i : i + window_len]
        filtered = np.fft.ifft(np.fft.fft(window) * mask).real
        out[i] = filtered[half]
    return out


def test_stft_matches_per_window_dft_oracle():
    rng = np.random.default_rng(21)
    series = rng.standard_normal(90)
    for window in (5, 15, 25):
        ours = stft_bandpass(series, window, 1.5, 2.5, 60.0)
        ref = _stft_bruteforce(series, window, 1.5, 2.5, 60.0)
        assert np.abs(ours - ref).max() < 1e-9


def test_stft_sinusoid_attenuation_matches_oracle():
    t = np.arange(120, dtype=float)
    series = np.sin(2 * np.pi * 2.0 * t / 60.0)
    ours = stft_bandpass(series, 15, 1.5, 2.5, 60.0)
    ref = _stft_bruteforce(series, 15, 1.5, 2.5, 60.0)
    assert np.abs(ours - ref).max() < 1e-9


def test_stft_constant_is_zeroed():
    out = stft_bandpass(np.full(60, 2.0), 15, 1.5, 2.5, 60.0)
    assert np.abs(out).max() < 1e-12


def test_stft_degenerate_window_equals_ideal_at_center():
    rng = np.random.default_rng(22)
    series = rng.standard_normal(61)
    full = stft_bandpass(series, 61, 1.0, 8.0, 30.0)
    ideal = ideal_bandpass(series, 1.0, 8.0, 30.0)
    assert full[30] == pytest.approx(ideal[30], abs=1e-9)


def test_stft_converges_to_ideal_with_window_length():
    t = np.arange(101, dtype=float)
    series = (
        np.sin(2 * np.pi * 3.0 * t / 30.0)
        + 0.5 * np.sin(2 * np.pi * 7.0 * t / 30.0)
        + 0.1 * t / 101.0
    )
    ideal = ideal_bandpass(series, 2.0, 4.0, 30.0)
    errs = []
    for window in (31, 61, 101):
        out = stft_bandpass(series, window, 2.0, 4.0, 30.0)
        errs.append(np.sqrt(np.mean((out - ideal) ** 2)))
    assert errs[0] > errs[1] > errs[2]


def test_stft_validates_window():
    with pytest.raises(ValueError, match="odd"):
        stft_bandpass(np.zeros(50), 10, 1.0, 2.0, 30.0)
    with pytest.raises(ValueError, match="exceeds"):
        stft_bandpass(np.zeros(9), 15, 1.0, 2.0, 30.0)


def test_stft_fir_taps_are_symmetric():
    taps = stft_fir_taps(15, 1.5, 2.5, 60.0)
    assert np.allclose(taps, taps[::-1], atol=1e-15)
