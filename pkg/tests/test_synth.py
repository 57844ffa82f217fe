import numpy as np
import pytest
from dataclasses import replace

from accelmag.synth import (
    BallSpec,
    reference_ball_spec,
    render_ball,
    render_ball_groundtruth,
    spec_to_text,
)

SMALL = BallSpec(image_size=(96, 96), start=(20.0, 20.0), duration_frames=40)


def test_reference_spec_fields():
    spec = reference_ball_spec()
    assert spec.radius == 10.0
    assert np.hypot(*spec.velocity) == pytest.approx(1.0)
    assert spec.intensity_amplitude == 20.0
    assert spec.intensity_freq_hz == 2.0
    assert spec.fps == 60.0


def test_render_is_deterministic():
    a = render_ball(SMALL)
    b = render_ball(SMALL)
    assert np.array_equal(a.frames, b.frames)


def test_static_zero_amplitude_is_constant():
    spec = replace(SMALL, velocity=(0.0, 0.0), intensity_amplitude=0.0)
    seq = render_ball(spec)
    assert np.all(seq.frames == seq.frames[0])


def test_background_pixels_temporally_constant():
    seq = render_ball(SMALL)
    # the swept corridor stays well clear of the far corner
    corner = seq.frames[:, 80:, 80:, :]
    assert np.all(corner == SMALL.background)


def test_disc_area_matches_circle():
    seq = render_ball(SMALL)
    luma = seq.frames[..., 0]
    t_idx = np.arange(SMALL.duration_frames)
    intensity = SMALL.base_intensity + SMALL.intensity_amplitude / 255.0 * np.sin(
        2 * np.pi * SMALL.intensity_freq_hz * t_idx / SMALL.fps
    )
    areas = luma.sum(axis=(1, 2)) / intensity
    expected = np.pi * SMALL.radius**2
    assert np.abs(areas - expected).max() / expected < 0.02


def test_whole_cycle_periodicity():
    # 61 frames at 2 Hz / 60 fps: frame 60 sits exactly two cycles after frame 0
    spec = replace(SMALL, duration_frames=61)
    seq = render_ball(spec)
    assert seq.frames[0].max() == pytest.approx(seq.frames[60].max(), abs=1e-12)


def test_groundtruth_factor_one_is_identical():
    assert np.array_equal(
        render_ball(SMALL).frames, render_ball_groundtruth(SMALL, 1.0).frames
    )


def test_groundtruth_scales_amplitude():
    plain = render_ball(SMALL)
    truth = render_ball_groundtruth(SMALL, 4.0)
    t_idx = np.arange(SMALL.duration_frames)
    # peak pixel carries base + amplitude * sin directly
    osc = np.sin(2 * np.pi * SMALL.intensity_freq_hz * t_idx / SMALL.fps)
    amp_plain = plain.frames.max(axis=(1, 2, 3)) - SMALL.base_intensity
    amp_truth = truth.frames.max(axis=(1, 2, 3)) - SMALL.base_intensity
    keep = osc > 0.2
    assert np.allclose(amp_truth[keep] / amp_plain[keep], 4.0, rtol=1e-9)


def test_groundtruth_difference_confined_to_disc():
    plain = render_ball(SMALL)
    truth = render_ball_groundtruth(SMALL, 4.0)
    diff = np.abs(truth.frames - plain.frames)
    support = plain.frames > SMALL.background
    assert np.all(support[diff > 0])


def test_ball_leaving_frame_errors():
    spec = replace(SMALL, velocity=(3.0, 3.0))
    with pytest.raises(ValueError, match="leaves"):
        render_ball(spec)


def test_groundtruth_clipping_errors():
    with pytest.raises(ValueError, match="clipping|leaves \\[0, 1\\]"):
        render_ball_groundtruth(SMALL, 10.0)


def test_grayscale_replicated_to_rgb():
    seq = render_ball(SMALL)
    assert seq.frames.shape[3] == 3
    assert np.array_equal(seq.frames[..., 0], seq.frames[..., 1])
    assert np.array_equal(seq.frames[..., 0], seq.frames[..., 2])


def test_spec_sidecar_text():
    text = spec_to_text(SMALL)
    assert "radius=10" in text
    assert "velocity=0.707107,0.707107" in text
    assert text.endswith("\n")
