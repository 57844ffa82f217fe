"""Spatial decompositions.

Two decompositions live here:

* a complex steerable pyramid built entirely in the frequency domain
  (raised-cosine radial windows, cos^(K-1) angular windows, half-plane
  masking for analytic sub-bands), used for phase-based motion analysis;
* a classic Gaussian pyramid with a 5-tap binomial kernel, used for
  intensity/color magnification.

The steerable filter bank is a tight frame: the squared magnitudes of
all band masks plus the high- and low-pass residuals sum to one at every
frequency, so analyze followed by synthesize reproduces the input to
machine precision. Sub-bands are stored on cropped frequency boxes that
tightly contain each mask's support, which decimates coarse scales
without breaking exact reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import NamedTuple

import numpy as np
from scipy import ndimage

MIN_BAND_PX = 16

BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def _rc_high(u: np.ndarray) -> np.ndarray:
    # cosine transition: 0 for u <= -1, 1 for u >= 0
    return np.cos(0.5 * np.pi * np.clip(-u, 0.0, 1.0))


def _rc_low(u: np.ndarray) -> np.ndarray:
    # complementary transition so that high^2 + low^2 == 1
    return np.sin(0.5 * np.pi * np.clip(-u, 0.0, 1.0))


def _centered_box(size: int, target: float) -> slice:
    """Centered slice of even length covering at least ``target`` samples."""
    if target >= size:
        return slice(0, size)
    length = min(size, 2 * int(np.ceil(target / 2.0)))
    center = size // 2
    return slice(center - length // 2, center + length // 2)


@dataclass(frozen=True)
class BandFilter:
    """One oriented band: crop box plus masks on the cropped grid."""

    scale: int
    orientation: int
    rows: slice
    cols: slice
    response: np.ndarray  # two-sided mask, used for synthesis
    analytic: np.ndarray  # half-plane doubled mask, used for analysis

    @property
    def key(self) -> tuple:
        return (self.scale, self.orientation)


class FilterBank:
    """Frequency-domain steerable filter bank for one image geometry.

    Parameters
    ----------
    height, width : int
        Image size in pixels.
    orientations : int
        Number of oriented bands per scale (>= 1).
    octave_fraction : float
        Log2 spacing between successive scales; 0.5 gives the half-octave
        bank used for motion magnification.
    depth : int, optional
        Number of scales. Defaults to as many as fit until the smallest
        band would drop below 16 px on a side.
    """

    def __init__(self, height, width, orientations=8, octave_fraction=0.5, depth=None):
        height, width = int(height), int(width)
        orientations = int(orientations)
        octave_fraction = float(octave_fraction)
        if height < 2 or width < 2:
            raise ValueError("image must be at least 2x2")
        if orientations < 1:
            raise ValueError("orientations must be >= 1")
        if not 0 < octave_fraction <= 1:
            raise ValueError("octave_fraction must lie in (0, 1]")

        max_depth = self._max_depth(height, width, octave_fraction)
        if depth is None:
            depth = max_depth
        depth = int(depth)
        if depth < 1 or depth > max_depth:
            raise ValueError(
                f"image {height}x{width} too small for depth {depth} "
                f"(max {max_depth} at octave fraction {octave_fraction})"
            )

        self.height = height
        self.width = width
        self.orientations = orientations
        self.octave_fraction = octave_fraction
        self.depth = depth

        fy = (np.arange(height) - height // 2) / (height / 2.0)
        fx = (np.arange(width) - width // 2) / (width / 2.0)
        gy, gx = np.meshgrid(fy, fx, indexing="ij")
        radius = np.hypot(gy, gx)
        radius[height // 2, width // 2] = np.finfo(float).tiny
        log_r = np.log2(radius)
        angle = np.arctan2(gy, gx)

        order = orientations - 1
        gain = np.sqrt(4.0**order / (orientations * comb(2 * order, order)))

        self.highpass_mask = _rc_high(log_r)
        low = _rc_low(log_r)
        self.bands: list[BandFilter] = []
        for k in range(1, depth + 1):
            radial = low * _rc_high(log_r + k * octave_fraction)
            low = low * _rc_low(log_r + k * octave_fraction)
            scale = 2.0 ** (-(k - 1) * octave_fraction)
            rows = _centered_box(height, height * scale)
            cols = _centered_box(width, width * scale)
            for b in range(orientations):
                theta = np.pi * b / orientations
                cos_t = np.cos(angle - theta)
                psi = (radial * gain * np.abs(cos_t) ** order)[rows, cols]
                analytic = psi * (1.0 + np.sign(cos_t[rows, cols]))
                self.bands.append(BandFilter(k, b, rows, cols, psi, analytic))

        lo_scale = 2.0 ** (-depth * octave_fraction)
        self.lowpass_rows = _centered_box(height, height * lo_scale)
        self.lowpass_cols = _centered_box(width, width * lo_scale)
        self.lowpass_mask = low[self.lowpass_rows, self.lowpass_cols]

        # combined residual power, used for pass-through of hi/lo residuals
        self._residual_sq = self.highpass_mask**2
        self._residual_sq[self.lowpass_rows, self.lowpass_cols] += self.lowpass_mask**2

    @staticmethod
    def _max_depth(height: int, width: int, octave_fraction: float) -> int:
        side = min(height, width)
        if side < MIN_BAND_PX:
            return 0
        # band at scale k lives on a box of side*2^(-(k-1)*f) samples
        return 1 + int(np.floor(np.log2(side / MIN_BAND_PX) / octave_fraction))

    def band_shapes(self) -> dict:
        return {
            f.key: (f.rows.stop - f.rows.start, f.cols.stop - f.cols.start)
            for f in self.bands
        }

    def tiling_map(self) -> np.ndarray:
        """Total squared system response over the full frequency grid."""
        total = self._residual_sq.copy()
        for f in self.bands:
            total[f.rows, f.cols] += f.response**2
        return total

    def tiling_residual(self) -> float:
        return float(np.abs(self.tiling_map() - 1.0).max())


def build_filter_bank(height, width, orientations=8, octave_fraction=0.5, depth=None) -> FilterBank:
    """Construct a :class:`FilterBank`; see the class for parameters."""
    return FilterBank(height, width, orientations, octave_fraction, depth)


@dataclass
class SteerablePyramid:
    """Complex sub-bands keyed by (scale, orientation) plus real residuals."""

    bands: dict
    highpass: np.ndarray
    lowpass: np.ndarray


class BandDecomposition(NamedTuple):
    amplitude: np.ndarray
    phase: np.ndarray


def _fft2c(image: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(np.fft.fft2(image, axes=(-2, -1)), axes=(-2, -1))


def _ifft2c(spectrum: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(np.fft.ifftshift(spectrum, axes=(-2, -1)), axes=(-2, -1))


def _box_weight(rows: slice, cols: slice, height: int, width: int) -> float:
    # value-preserving rescale for frequency-domain decimation
    area = (rows.stop - rows.start) * (cols.stop - cols.start)
    return area / float(height * width)


def analyze(image: np.ndarray, bank: FilterBank) -> SteerablePyramid:
    """Decompose a single-channel image into complex analytic sub-bands."""
    image = np.asarray(image, dtype=np.float64)
    if image.shape != (bank.height, bank.width):
        raise ValueError(
            f"image shape {image.shape} does not match bank "
            f"({bank.height}, {bank.width})"
        )
    spectrum = _fft2c(image)
    bands = {}
    for f in bank.bands:
        weight = _box_weight(f.rows, f.cols, bank.height, bank.width)
        bands[f.key] = weight * _ifft2c(spectrum[f.rows, f.cols] * f.analytic)
    highpass = _ifft2c(spectrum * bank.highpass_mask).real
    lo_weight = _box_weight(bank.lowpass_rows, bank.lowpass_cols, bank.height, bank.width)
    lowpass = lo_weight * _ifft2c(
        spectrum[bank.lowpass_rows, bank.lowpass_cols] * bank.lowpass_mask
    ).real
    return SteerablePyramid(bands, highpass, lowpass)


def synthesize(pyr: SteerablePyramid, bank: FilterBank) -> np.ndarray:
    """Invert :func:`analyze`. Exact up to floating-point rounding."""
    expected = {f.key for f in bank.bands}
    if set(pyr.bands) != expected or pyr.highpass.shape != (bank.height, bank.width):
        raise ValueError("pyramid geometry does not match bank")
    acc = _fft2c(pyr.highpass) * bank.highpass_mask
    acc = acc.astype(np.complex128)
    lo_weight = _box_weight(bank.lowpass_rows, bank.lowpass_cols, bank.height, bank.width)
    acc[bank.lowpass_rows, bank.lowpass_cols] += (
        _fft2c(pyr.lowpass) * bank.lowpass_mask / lo_weight
    )
    for f in bank.bands:
        band = pyr.bands[f.key]
        if band.shape != f.response.shape:
            raise ValueError(f"band {f.key} has shape {band.shape}, expected {f.response.shape}")
        weight = _box_weight(f.rows, f.cols, bank.height, bank.width)
        acc[f.rows, f.cols] += _fft2c(band) * f.response / weight
    return _ifft2c(acc).real


def to_phase_amplitude(pyr: SteerablePyramid) -> dict:
    """Polar form of every band; the phase of a zero coefficient is 0."""
    return {
        key: BandDecomposition(np.abs(band), np.angle(band))
        for key, band in pyr.bands.items()
    }


def from_phase_amplitude(decomposition: dict, highpass: np.ndarray, lowpass: np.ndarray) -> SteerablePyramid:
    """Rebuild a pyramid from per-band polar data plus the residuals."""
    bands = {
        key: d.amplitude * np.exp(1j * d.phase) for key, d in decomposition.items()
    }
    return SteerablePyramid(bands, highpass, lowpass)


# ---------------------------------------------------------------------------
# Gaussian pyramid


def _blur_axis(arr: np.ndarray, axis: int) -> np.ndarray:
    return ndimage.convolve1d(arr, BINOMIAL5, axis=axis, mode="nearest")


def _reduce_once(arr: np.ndarray, axes: tuple) -> np.ndarray:
    out = _blur_axis(_blur_axis(arr, axes[0]), axes[1])
    slicer = [slice(None)] * arr.ndim
    slicer[axes[0]] = slice(None, None, 2)
    slicer[axes[1]] = slice(None, None, 2)
    return out[tuple(slicer)]


def reduce_stack(arr: np.ndarray, levels: int, axes: tuple = (0, 1)) -> np.ndarray:
    """Blur-then-decimate ``levels`` times along the two spatial axes."""
    for _ in range(levels):
        arr = _reduce_once(arr, axes)
    return arr


def gaussian_pyramid(image: np.ndarray, levels: int) -> list:
    """Gaussian pyramid of ``image``; element k is reduced k times.

    ``levels`` is the number of reductions, so the result has
    ``levels + 1`` grids and element 0 is the input itself.
    """
    image = np.asarray(image, dtype=np.float64)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if min(image.shape[0], image.shape[1]) < 2**levels:
        raise ValueError(
            f"image of size {image.shape[:2]} too small for {levels} halvings"
        )
    pyr = [image]
    for _ in range(levels):
        pyr.append(_reduce_once(pyr[-1], (0, 1)))
    return pyr


def _expand_axis(arr: np.ndarray, axis: int, out_len: int) -> np.ndarray:
    # Replicate the edge samples before zero insertion so constants are
    # preserved exactly all the way to the border.
    padded = np.concatenate(
        [
            np.take(arr, [0, 0], axis=axis),
            arr,
            np.take(arr, [-1, -1], axis=axis),
        ],
        axis=axis,
    )
    shape = list(padded.shape)
    n = shape[axis]
    shape[axis] = 2 * n
    upsampled = np.zeros(shape, dtype=arr.dtype)
    slicer = [slice(None)] * arr.ndim
    slicer[axis] = slice(None, None, 2)
    upsampled[tuple(slicer)] = padded
    # doubled-gain kernel restores unit DC response after zero insertion
    out = ndimage.convolve1d(upsampled, BINOMIAL5 * 2.0, axis=axis, mode="constant")
    slicer[axis] = slice(4, 4 + out_len)
    return out[tuple(slicer)]


def expand_to(arr: np.ndarray, target: tuple, times: int, axes: tuple = (0, 1)) -> np.ndarray:
    """Upsample by 2 ``times`` times along ``axes``, cropped to ``target``."""
    for step in range(times):
        last = step == times - 1
        for axis, tgt in zip(axes, target):
            grown = 2 * arr.shape[axis]
            arr = _expand_axis(arr, axis, min(grown, tgt) if last else grown)
    for axis, tgt in zip(axes, target):
        if arr.shape[axis] > tgt:
            arr = np.take(arr, range(tgt), axis=axis)
        elif arr.shape[axis] < tgt:
            pad = [(0, 0)] * arr.ndim
            pad[axis] = (0, tgt - arr.shape[axis])
            arr = np.pad(arr, pad, mode="edge")
    return arr


def upsample_to(grid: np.ndarray, target_h: int, target_w: int, times: int) -> np.ndarray:
    """Repeated x2 upsampling of a grid, then crop/pad to the exact target.

    Constants are mapped to the same constant (unit DC gain); each x2 step
    quadruples the sample sum so the underlying integral is preserved on
    the finer grid.
    """
    grid = np.asarray(grid, dtype=np.float64)
    return expand_to(grid, (int(target_h), int(target_w)), int(times), axes=(0, 1))
