"""One-dimensional temporal filters applied along the frame axis.

The acceleration filter is a sampled second derivative of a Gaussian
(temporal Laplacian). Its taps are corrected to sum to zero exactly and
are symmetric, so constant and linearly ramping series are annihilated
in the discrete implementation, not just asymptotically. The linear
baselines (whole-series ideal bandpass and its sliding-window STFT
variant) live here as well, together with temporal phase unwrapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ._validation import check_positive

_BOUNDARY_MODES = {"replicate": "nearest", "reflect": "reflect"}


@dataclass(frozen=True)
class TemporalKernel:
    """Discrete 1-D filter: taps, center index, and Gaussian scale."""

    taps: np.ndarray
    center: int
    sigma: float

    def __len__(self) -> int:
        return len(self.taps)


def sigma_from_frequency(fps: float, freq_hz: float) -> float:
    """Gaussian scale (frames) tuned to ``freq_hz``: fps / (4 w sqrt(2)).

    A temporal window of a quarter period is centered on each frame; the
    matching Laplacian scale is that window divided by sqrt(2). At this
    scale the normalized second-derivative response at the target
    frequency sits near its maximum.
    """
    fps = check_positive(fps, "fps")
    freq_hz = check_positive(freq_hz, "freq_hz")
    return fps / (4.0 * freq_hz * np.sqrt(2.0))


def kernel_radius(sigma: float) -> int:
    return int(np.ceil(4.0 * sigma))


def log_kernel(sigma: float) -> TemporalKernel:
    """Sampled second Gaussian derivative with exact moment corrections.

    Taps sample d^2/dt^2 of a unit-mass Gaussian at integer offsets over
    radius ceil(4 sigma). Truncation leaves small moment errors, so a
    Gaussian-shaped correction is removed to make the taps sum to zero
    exactly and to restore the exact response of 2 on quadratics.
    Symmetric sampling makes the first moment vanish by construction, so
    constant and linearly ramping series are annihilated exactly.
    """
    sigma = float(sigma)
    if sigma <= 0.5:
        raise ValueError(f"sigma must exceed 0.5 frames, got {sigma}")
    radius = kernel_radius(sigma)
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    gauss = np.exp(-(t**2) / (2.0 * sigma**2)) / (sigma * np.sqrt(2.0 * np.pi))
    taps = gauss * (t**2 - sigma**2) / sigma**4
    # zero-sum basis u and a second, t^2-sensitive basis v
    u = gauss / gauss.sum()
    v = gauss * (t**2 - np.dot(u, t**2))
    v /= np.dot(v, t**2)
    taps = taps - taps.sum() * u
    taps = taps - (np.dot(taps, t**2) - 2.0) * v
    return TemporalKernel(taps, radius, sigma)


def convolve_time(series: np.ndarray, kernel: TemporalKernel, boundary: str = "replicate", axis: int = 0) -> np.ndarray:
    """Convolve along ``axis`` with the stated boundary extension.

    Output length equals input length; the series must be at least as
    long as the kernel.
    """
    if boundary not in _BOUNDARY_MODES:
        raise ValueError(f"unknown boundary {boundary!r}")
    series = np.asarray(series, dtype=np.float64)
    if series.shape[axis] < len(kernel):
        raise ValueError(
            f"series of length {series.shape[axis]} shorter than kernel "
            f"of length {len(kernel)}"
        )
    return ndimage.convolve1d(
        series, kernel.taps, axis=axis, mode=_BOUNDARY_MODES[boundary]
    )


def acceleration_filter(series: np.ndarray, sigma: float, boundary: str = "replicate", axis: int = 0) -> np.ndarray:
    """Scale-normalized acceleration response: -sigma^2 * (series (x) LoG).

    The sigma^2 factor makes the response magnitude comparable across
    scales and the sign flip gives a positive gain (about 0.67) at the
    frequency the scale is tuned to, so adding alpha times this response
    magnifies the tuned oscillation. Constant and linear series still map
    to zero.
    """
    return -(float(sigma) ** 2) * convolve_time(series, log_kernel(sigma), boundary, axis)


def unwrap_phase(series: np.ndarray, axis: int = 0) -> np.ndarray:
    """Remove 2 pi jumps so successive differences lie within [-pi, pi].

    The first sample is preserved and every output sample stays congruent
    to its input modulo 2 pi.
    """
    return np.unwrap(np.asarray(series, dtype=np.float64), axis=axis)


def _band_mask(n: int, f_lo: float, f_hi: float, fps: float) -> np.ndarray:
    freqs = np.fft.fftfreq(n, d=1.0 / fps)
    return (np.abs(freqs) >= f_lo) & (np.abs(freqs) <= f_hi)


def _check_band(f_lo: float, f_hi: float, fps: float) -> None:
    if not (0 <= f_lo < f_hi <= fps / 2.0):
        raise ValueError(
            f"invalid band [{f_lo}, {f_hi}] Hz for fps {fps}; "
            "need 0 <= lo < hi <= fps/2"
        )


def ideal_bandpass(series: np.ndarray, f_lo: float, f_hi: float, fps: float, axis: int = 0) -> np.ndarray:
    """Whole-series DFT bandpass: keep bins with |f| in [f_lo, f_hi]."""
    _check_band(f_lo, f_hi, fps)
    series = np.asarray(series, dtype=np.float64)
    n = series.shape[axis]
    mask = _band_mask(n, f_lo, f_hi, fps)
    shape = [1] * series.ndim
    shape[axis] = n
    spectrum = np.fft.fft(series, axis=axis) * mask.reshape(shape)
    return np.fft.ifft(spectrum, axis=axis).real


def stft_fir_taps(window_len: int, f_lo: float, f_hi: float, fps: float) -> np.ndarray:
    """Equivalent FIR taps of the sliding-window bandpass.

    Applying the ideal bandpass inside a length-N rectangular window and
    keeping the center sample is, by linearity, a fixed FIR filter; these
    are its taps (symmetric, length N).
    """
    window_len = int(window_len)
    if window_len % 2 != 1 or window_len < 1:
        raise ValueError(f"window length must be odd and positive, got {window_len}")
    _check_band(f_lo, f_hi, fps)
    mask = _band_mask(window_len, f_lo, f_hi, fps).astype(np.float64)
    return np.roll(np.fft.ifft(mask).real, window_len // 2)


def stft_bandpass(series: np.ndarray, window_len: int, f_lo: float, f_hi: float, fps: float, axis: int = 0) -> np.ndarray:
    """Sliding-window bandpass, hop 1, rectangular window.

    For each position the ideal bandpass is applied inside the window and
    the center sample kept; boundaries use replicate extension. When the
    window spans the whole series the center output sample equals the
    whole-series ideal bandpass at that sample.
    """
    series = np.asarray(series, dtype=np.float64)
    if int(window_len) > series.shape[axis]:
        raise ValueError(
            f"window of length {window_len} exceeds series length {series.shape[axis]}"
        )
    taps = stft_fir_taps(window_len, f_lo, f_hi, fps)
    return ndimage.correlate1d(series, taps, axis=axis, mode="nearest")
