"""Synthetic moving-ball sequences with analytic ground truth.

A flat disc moves at constant velocity while its intensity oscillates
sinusoidally. Edges are anti-aliased by 4x4 subpixel coverage so that
sub-pixel speeds produce smooth image changes. The ground-truth
magnification re-renders the same scene with the oscillation amplitude
scaled analytically, which gives an exact reference for MSE evaluation.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .io import FrameSequence

_SUBGRID = 4
_AA_MARGIN = 1.0  # coverage support extends half a pixel past the radius


@dataclass(frozen=True)
class BallSpec:
    """Geometry and photometry of the synthetic ball sequence.

    ``intensity_amplitude`` is in 8-bit units (20 means 20/255 in the
    unit sample range). ``start`` and ``velocity`` are (x, y) in pixels
    and pixels/frame.
    """

    image_size: tuple = (256, 256)
    radius: float = 10.0
    start: tuple = (20.0, 20.0)
    velocity: tuple = (2**-0.5, 2**-0.5)
    base_intensity: float = 0.5
    intensity_amplitude: float = 20.0
    intensity_freq_hz: float = 2.0
    fps: float = 60.0
    duration_frames: int = 120
    background: float = 0.0


def reference_ball_spec(**overrides) -> BallSpec:
    """The reference configuration: radius 10, 1 px/frame diagonal,
    amplitude 20, 2 Hz at 60 fps."""
    return replace(BallSpec(), **overrides)


def _validate(spec: BallSpec, amplitude_8bit: float) -> None:
    h, w = spec.image_size
    if spec.radius <= 0:
        raise ValueError("radius must be positive")
    if spec.duration_frames < 1:
        raise ValueError("duration must be at least one frame")
    if not 0 <= spec.background <= 1:
        raise ValueError("background must lie in [0, 1]")
    amp = amplitude_8bit / 255.0
    if not (0 <= spec.base_intensity - amp and spec.base_intensity + amp <= 1):
        raise ValueError(
            f"intensity {spec.base_intensity} +/- {amp:.4f} leaves [0, 1]; "
            "clipping would corrupt the ground truth"
        )
    reach = spec.radius + _AA_MARGIN
    for t in (0, spec.duration_frames - 1):
        cx = spec.start[0] + t * spec.velocity[0]
        cy = spec.start[1] + t * spec.velocity[1]
        if not (reach <= cx <= w - 1 - reach and reach <= cy <= h - 1 - reach):
            raise ValueError(
                f"ball leaves the frame at t={t} (center {cx:.1f}, {cy:.1f})"
            )


def _coverage(spec: BallSpec, cx: float, cy: float):
    """Anti-aliased disc coverage inside its bounding box."""
    reach = spec.radius + _AA_MARGIN
    x0, x1 = int(np.floor(cx - reach)), int(np.ceil(cx + reach)) + 1
    y0, y1 = int(np.floor(cy - reach)), int(np.ceil(cy + reach)) + 1
    sub = (np.arange(_SUBGRID) + 0.5) / _SUBGRID - 0.5
    ys = (np.arange(y0, y1)[:, None] + sub[None, :] - cy).ravel()
    xs = (np.arange(x0, x1)[:, None] + sub[None, :] - cx).ravel()
    inside = (ys[:, None] ** 2 + xs[None, :] ** 2) <= spec.radius**2
    inside = inside.reshape(y1 - y0, _SUBGRID, x1 - x0, _SUBGRID)
    cover = inside.mean(axis=(1, 3))
    return (slice(y0, y1), slice(x0, x1)), cover


def _render(spec: BallSpec, amplitude_8bit: float) -> FrameSequence:
    _validate(spec, amplitude_8bit)
    h, w = spec.image_size
    t_idx = np.arange(spec.duration_frames)
    intensity = spec.base_intensity + (amplitude_8bit / 255.0) * np.sin(
        2.0 * np.pi * spec.intensity_freq_hz * t_idx / spec.fps
    )
    gray = np.full((spec.duration_frames, h, w), spec.background, dtype=np.float64)
    for t in t_idx:
        cx = spec.start[0] + t * spec.velocity[0]
        cy = spec.start[1] + t * spec.velocity[1]
        box, cover = _coverage(spec, cx, cy)
        gray[t][box] = spec.background + cover * (intensity[t] - spec.background)
    frames = np.repeat(gray[..., np.newaxis], 3, axis=3)
    return FrameSequence(frames, spec.fps, "rgb")


def render_ball(spec: BallSpec) -> FrameSequence:
    """Render the ball sequence (grayscale replicated to RGB)."""
    return _render(spec, spec.intensity_amplitude)


def render_ball_groundtruth(spec: BallSpec, gt_factor: float) -> FrameSequence:
    """Re-render with the oscillation amplitude multiplied by ``gt_factor``.

    The trajectory and every other parameter stay identical, so the
    result is the exact target of an intensity magnification.
    """
    if gt_factor < 0:
        raise ValueError("gt_factor must be non-negative")
    return _render(spec, spec.intensity_amplitude * gt_factor)


def spec_to_text(spec: BallSpec) -> str:
    """Plain key=value serialization used for sidecar files."""
    lines = []
    for key, value in asdict(spec).items():
        if isinstance(value, tuple):
            value = ",".join(f"{v:g}" for v in value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"
