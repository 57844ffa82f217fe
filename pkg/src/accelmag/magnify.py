"""End-to-end magnification pipelines as sklearn-style transformers.

Three pipelines:

* :class:`MotionMagnifier`: phase-based acceleration magnification.
  Each frame is decomposed with a complex steerable pyramid; per
  sub-band coefficient the temporal phase series is unwrapped, filtered
  with the acceleration filter, scaled by alpha and added back onto the
  phase. Amplitudes are never modified; residuals pass through.
* :class:`ColorMagnifier` with ``temporal_filter="acceleration"``:
  intensity acceleration magnification on one Gaussian-pyramid level.
* :class:`ColorMagnifier` with an ``ideal:`` or ``stft:`` filter: the
  linear Eulerian baseline (frame + alpha * bandpassed level signal).

All pipelines process YIQ channels independently (or luma only), are
exactly the identity at alpha = 0, and leave temporally constant videos
unchanged. Out-of-gamut samples are never clipped here; clipping happens
at write time in :mod:`accelmag.io`.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_fps, check_frame_array, check_non_negative
from .io import FrameSequence
from .pyramid import FilterBank, _fft2c, _ifft2c, expand_to, reduce_stack
from .temporal import (
    ideal_bandpass,
    kernel_radius,
    log_kernel,
    sigma_from_frequency,
    stft_bandpass,
    unwrap_phase,
)

THREADS_ENV_VAR = "ACCELMAG_THREADS"


@dataclass(frozen=True)
class FilterSpec:
    """Parsed temporal-filter selector."""

    kind: str  # "acceleration", "ideal" or "stft"
    f_lo: float | None = None
    f_hi: float | None = None
    window: int | None = None

    def __str__(self) -> str:
        if self.kind == "acceleration":
            return "acceleration"
        if self.kind == "ideal":
            return f"ideal:{self.f_lo:g},{self.f_hi:g}"
        return f"stft:{self.window},{self.f_lo:g},{self.f_hi:g}"


def parse_filter_spec(spec: str) -> FilterSpec:
    """Parse ``acceleration``, ``ideal:LO,HI`` or ``stft:N,LO,HI``."""
    if isinstance(spec, FilterSpec):
        return spec
    text = str(spec).strip()
    if text == "acceleration":
        return FilterSpec("acceleration")
    try:
        name, _, args = text.partition(":")
        parts = [p.strip() for p in args.split(",")]
        if name == "ideal" and len(parts) == 2:
            return FilterSpec("ideal", f_lo=float(parts[0]), f_hi=float(parts[1]))
        if name == "stft" and len(parts) == 3:
            return FilterSpec(
                "stft", f_lo=float(parts[1]), f_hi=float(parts[2]), window=int(parts[0])
            )
    except ValueError:
        pass
    raise ValueError(
        f"bad temporal filter {spec!r}; expected 'acceleration', "
        "'ideal:LO,HI' or 'stft:N,LO,HI'"
    )


def default_thread_count() -> int:
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _coerce_input(X, fps):
    if isinstance(X, FrameSequence):
        if X.colorspace != "rgb":
            raise ValueError("magnification expects an RGB sequence")
        return X.frames, X.fps, True
    return check_frame_array(X), check_fps(fps), False


def _package_output(frames: np.ndarray, fps: float, as_sequence: bool):
    if as_sequence:
        return FrameSequence(frames, fps, "rgb")
    return frames


def _is_gray(frames: np.ndarray) -> bool:
    return frames.shape[3] == 3 and np.array_equal(
        frames[..., 0], frames[..., 1]
    ) and np.array_equal(frames[..., 0], frames[..., 2])


def _to_working(frames: np.ndarray) -> np.ndarray:
    if frames.shape[3] == 3:
        from .io import RGB_TO_YIQ

        if _is_gray(frames):
            # gray pixels have exactly zero chroma; spell that out so the
            # chroma channels are recognized as constant downstream
            work = np.zeros_like(frames)
            work[..., 0] = frames @ RGB_TO_YIQ[0]
            return work
        return frames @ RGB_TO_YIQ.T
    return frames.copy()


def _from_working(work: np.ndarray) -> np.ndarray:
    if work.shape[3] == 3:
        from .io import YIQ_TO_RGB

        return work @ YIQ_TO_RGB.T
    return work


def _channel_indices(n_channels: int, luma_only: bool):
    return range(1 if luma_only else n_channels)


def _chunks(items, size):
    for i in range(0, len(items), size):
        yield items[i : i + size]


# ---------------------------------------------------------------------------
# motion (phase) pipeline


def _filter_band_phase(band_stack, taps, sigma, alpha, boundary, smooth_sigma):
    """Magnify phase acceleration of one band's (T, h, w) time stack.

    Amplitudes of the returned coefficients equal those of the input
    exactly; only the phase changes.
    """
    amplitude = np.abs(band_stack)
    phase = unwrap_phase(np.angle(band_stack), axis=0)
    mode = "nearest" if boundary == "replicate" else "reflect"
    response = ndimage.convolve1d(phase, taps, axis=0, mode=mode)
    delta = (-(sigma**2) * alpha) * response
    if smooth_sigma > 0:
        weight = ndimage.gaussian_filter(amplitude, (0, smooth_sigma, smooth_sigma))
        delta = ndimage.gaussian_filter(amplitude * delta, (0, smooth_sigma, smooth_sigma))
        delta /= weight + 1e-12
    return amplitude * np.exp(1j * (phase + delta))


def _magnify_motion_channel(stack, bank, sigma, alpha, boundary, smooth_sigma, n_threads):
    spectra = _fft2c(stack)
    acc = spectra * bank._residual_sq
    taps = log_kernel(sigma).taps

    def band_contribution(filt):
        sub = _ifft2c(spectra[:, filt.rows, filt.cols] * filt.analytic)
        sub = _filter_band_phase(sub, taps, sigma, alpha, boundary, smooth_sigma)
        return _fft2c(sub) * filt.response

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            for chunk in _chunks(bank.bands, n_threads):
                for filt, spec in zip(chunk, pool.map(band_contribution, chunk)):
                    acc[:, filt.rows, filt.cols] += spec
    else:
        for filt in bank.bands:
            acc[:, filt.rows, filt.cols] += band_contribution(filt)
    return _ifft2c(acc).real


class MotionMagnifier(BaseEstimator, TransformerMixin):
    """Phase-based acceleration magnification of subtle motion.

    Parameters
    ----------
    alpha : float
        Magnification factor applied to the filtered phase.
    target_freq_hz : float, optional
        Frequency of interest; sets the temporal scale via
        fps / (4 w sqrt(2)) unless ``sigma`` is given.
    fps : float, optional
        Frame rate; required when transforming bare arrays.
    sigma : float, optional
        Explicit temporal Gaussian scale in frames, overriding the
        frequency rule.
    orientations : int
        Oriented bands per pyramid scale.
    octave_fraction : float
        Log2 scale spacing of the pyramid (0.5 = half octave).
    depth : int, optional
        Pyramid depth; defaults to all scales with bands >= 16 px.
    luma_only : bool
        Process only Y of YIQ instead of all three channels.
    phase_smooth_sigma : float
        Optional amplitude-weighted spatial blur of the filtered phase,
        in pixels. Off (0) by default.
    boundary : str
        Temporal boundary extension, ``"replicate"`` or ``"reflect"``.
    n_threads : int, optional
        Worker threads across sub-bands. Output does not depend on it.
    """

    def __init__(
        self,
        alpha=8.0,
        target_freq_hz=None,
        fps=None,
        sigma=None,
        orientations=8,
        octave_fraction=0.5,
        depth=None,
        luma_only=False,
        phase_smooth_sigma=0.0,
        boundary="replicate",
        n_threads=None,
    ):
        self.alpha = alpha
        self.target_freq_hz = target_freq_hz
        self.fps = fps
        self.sigma = sigma
        self.orientations = orientations
        self.octave_fraction = octave_fraction
        self.depth = depth
        self.luma_only = luma_only
        self.phase_smooth_sigma = phase_smooth_sigma
        self.boundary = boundary
        self.n_threads = n_threads

    def _resolve_sigma(self, fps: float) -> float:
        if self.sigma is not None:
            return float(self.sigma)
        if self.target_freq_hz is None:
            raise ValueError("either sigma or target_freq_hz must be set")
        return sigma_from_frequency(fps, self.target_freq_hz)

    def fit(self, X, y=None):
        frames, fps, _ = _coerce_input(X, self.fps)
        check_non_negative(self.alpha, "alpha")
        self.sigma_ = self._resolve_sigma(fps)
        self.kernel_len_ = 2 * kernel_radius(self.sigma_) + 1
        if self.alpha != 0 and frames.shape[0] < self.kernel_len_:
            raise ValueError(
                f"video of {frames.shape[0]} frames shorter than the "
                f"temporal kernel ({self.kernel_len_} taps at sigma "
                f"{self.sigma_:.2f})"
            )
        self.n_frames_ = frames.shape[0]
        return self

    def transform(self, X):
        frames, fps, as_seq = _coerce_input(X, self.fps)
        alpha = check_non_negative(self.alpha, "alpha")
        if alpha == 0:
            return _package_output(frames.copy(), fps, as_seq)
        sigma = self._resolve_sigma(fps)
        if frames.shape[0] < 2 * kernel_radius(sigma) + 1:
            raise ValueError("video too short for the temporal kernel")
        n_threads = self.n_threads if self.n_threads else 1
        bank = FilterBank(
            frames.shape[1],
            frames.shape[2],
            self.orientations,
            self.octave_fraction,
            self.depth,
        )
        work = _to_working(frames)
        for c in _channel_indices(frames.shape[3], self.luma_only):
            if not work[..., c].any():  # identically zero channel
                continue
            work[..., c] = _magnify_motion_channel(
                np.ascontiguousarray(work[..., c]),
                bank,
                sigma,
                alpha,
                self.boundary,
                float(self.phase_smooth_sigma),
                int(n_threads),
            )
        return _package_output(_from_working(work), fps, as_seq)


# ---------------------------------------------------------------------------
# color (intensity) pipeline


class ColorMagnifier(BaseEstimator, TransformerMixin):
    """Intensity magnification on one Gaussian-pyramid level.

    With ``temporal_filter="acceleration"`` only deviations from linear
    intensity change are magnified. With ``ideal:LO,HI`` or
    ``stft:N,LO,HI`` this is the linear Eulerian baseline. In both cases
    the filtered level signal is scaled by alpha, upsampled to full
    resolution and added onto the original frames.

    Parameters mirror :class:`MotionMagnifier` where they overlap;
    ``color_level`` selects the pyramid level that is magnified.
    """

    def __init__(
        self,
        alpha=8.0,
        temporal_filter="acceleration",
        target_freq_hz=None,
        fps=None,
        sigma=None,
        color_level=3,
        luma_only=False,
        boundary="replicate",
    ):
        self.alpha = alpha
        self.temporal_filter = temporal_filter
        self.target_freq_hz = target_freq_hz
        self.fps = fps
        self.sigma = sigma
        self.color_level = color_level
        self.luma_only = luma_only
        self.boundary = boundary

    def _resolve(self, frames, fps):
        spec = parse_filter_spec(self.temporal_filter)
        sigma = None
        if spec.kind == "acceleration":
            if self.sigma is not None:
                sigma = float(self.sigma)
            elif self.target_freq_hz is not None:
                sigma = sigma_from_frequency(fps, self.target_freq_hz)
            else:
                raise ValueError("acceleration filtering needs sigma or target_freq_hz")
            if self.alpha != 0 and frames.shape[0] < 2 * kernel_radius(sigma) + 1:
                raise ValueError("video too short for the temporal kernel")
        level = int(self.color_level)
        if level < 1:
            raise ValueError("color_level must be >= 1")
        if min(frames.shape[1], frames.shape[2]) < 2**level:
            raise ValueError(
                f"frames of size {frames.shape[1:3]} too small for "
                f"{level} pyramid halvings"
            )
        return spec, sigma, level

    def fit(self, X, y=None):
        frames, fps, _ = _coerce_input(X, self.fps)
        check_non_negative(self.alpha, "alpha")
        spec, sigma, level = self._resolve(frames, fps)
        self.filter_spec_ = spec
        self.sigma_ = sigma
        self.level_ = level
        return self

    def _filter_level(self, level_stack, spec, sigma, fps):
        if spec.kind == "acceleration":
            taps = log_kernel(sigma).taps
            mode = "nearest" if self.boundary == "replicate" else "reflect"
            return -(sigma**2) * ndimage.convolve1d(level_stack, taps, axis=0, mode=mode)
        if spec.kind == "ideal":
            return ideal_bandpass(level_stack, spec.f_lo, spec.f_hi, fps, axis=0)
        return stft_bandpass(level_stack, spec.window, spec.f_lo, spec.f_hi, fps, axis=0)

    def _dc_gain(self, spec) -> float:
        # response of the filter to a temporally constant series
        if spec.kind == "acceleration":
            return 0.0
        return 1.0 if spec.f_lo == 0 else 0.0

    def transform(self, X):
        frames, fps, as_seq = _coerce_input(X, self.fps)
        alpha = check_non_negative(self.alpha, "alpha")
        if alpha == 0:
            return _package_output(frames.copy(), fps, as_seq)
        spec, sigma, level = self._resolve(frames, fps)
        h, w = frames.shape[1], frames.shape[2]
        work = _to_working(frames)
        out = work.copy()
        for c in _channel_indices(frames.shape[3], self.luma_only):
            chan = work[..., c]
            if np.all(chan == chan[0]):
                # temporally constant channel: the filter response is the
                # DC gain times the level signal, identical for all frames
                gain = self._dc_gain(spec)
                if gain != 0.0:
                    base = reduce_stack(chan[0], level, axes=(0, 1))
                    delta = alpha * gain * expand_to(base, (h, w), level, axes=(0, 1))
                    out[..., c] = chan + delta[np.newaxis]
                continue
            level_stack = reduce_stack(chan, level, axes=(1, 2))
            filtered = self._filter_level(level_stack, spec, sigma, fps)
            delta = alpha * expand_to(filtered, (h, w), level, axes=(1, 2))
            out[..., c] = chan + delta
        return _package_output(_from_working(out), fps, as_seq)


# ---------------------------------------------------------------------------
# functional wrappers


def magnify_motion_acceleration(seq, alpha, target_freq_hz=None, sigma=None, **kwargs):
    """Phase-based acceleration magnification of a sequence or array."""
    est = MotionMagnifier(alpha=alpha, target_freq_hz=target_freq_hz, sigma=sigma, **kwargs)
    return est.fit(seq).transform(seq)


def magnify_color_acceleration(seq, alpha, target_freq_hz=None, sigma=None, color_level=3, **kwargs):
    """Intensity acceleration magnification on one pyramid level."""
    est = ColorMagnifier(
        alpha=alpha,
        temporal_filter="acceleration",
        target_freq_hz=target_freq_hz,
        sigma=sigma,
        color_level=color_level,
        **kwargs,
    )
    return est.fit(seq).transform(seq)


def magnify_color_linear(seq, alpha, temporal_filter, color_level=3, **kwargs):
    """Linear Eulerian intensity magnification (bandpass filters only)."""
    spec = parse_filter_spec(temporal_filter)
    if spec.kind == "acceleration":
        raise ValueError("linear magnification requires an ideal: or stft: filter")
    est = ColorMagnifier(
        alpha=alpha, temporal_filter=spec, color_level=color_level, **kwargs
    )
    return est.fit(seq).transform(seq)
