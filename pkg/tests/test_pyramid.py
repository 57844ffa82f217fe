import numpy as np
import pytest

from accelmag.pyramid import (
    FilterBank,
    analyze,
    build_filter_bank,
    from_phase_amplitude,
    gaussian_pyramid,
    synthesize,
    to_phase_amplitude,
    upsample_to,
)


@pytest.fixture(scope="module")
def bank_128():
    return build_filter_bank(128, 128, orientations=8, octave_fraction=0.5)


def test_tiling_residual_half_octave():
    bank = build_filter_bank(256, 256, orientations=8, octave_fraction=0.5)
    assert bank.tiling_residual() < 1e-10


def test_tiling_residual_single_orientation_full_octave():
    bank = build_filter_bank(128, 128, orientations=1, octave_fraction=1.0)
    assert bank.tiling_residual() < 1e-10


def test_tiling_residual_rectangular_odd():
    bank = build_filter_bank(96, 67, orientations=4, octave_fraction=0.5)
    assert bank.tiling_residual() < 1e-10


def test_depth_too_large_errors():
    with pytest.raises(ValueError, match="too small"):
        build_filter_bank(8, 8, depth=6)
    with pytest.raises(ValueError, match="too small"):
        build_filter_bank(8, 8)  # even one scale needs 16 px


def test_band_sizes_decrease_with_scale(bank_128):
    shapes = bank_128.band_shapes()
    sides = [shapes[(k, 0)][0] for k in range(1, bank_128.depth + 1)]
    assert sides[0] == 128
    assert all(a >= b for a, b in zip(sides, sides[1:]))
    assert sides[-1] >= 16


def test_constant_image_energy_in_lowpass(bank_128):
    pyr = analyze(np.full((128, 128), 0.625), bank_128)
    for band in pyr.bands.values():
        assert np.abs(band).max() < 1e-12
    assert np.abs(pyr.highpass).max() < 1e-12
    # decimated lowpass carries the constant at its own resolution
    assert np.allclose(pyr.lowpass, 0.625, atol=1e-10)


def test_roundtrip_random(bank_128):
    rng = np.random.default_rng(0)
    img = rng.random((128, 128))
    rec = synthesize(analyze(img, bank_128), bank_128)
    assert np.linalg.norm(rec - img) / np.linalg.norm(img) < 1e-4


def test_roundtrip_idempotent(bank_128):
    rng = np.random.default_rng(1)
    img = rng.random((128, 128))
    once = synthesize(analyze(img, bank_128), bank_128)
    twice = synthesize(analyze(once, bank_128), bank_128)
    assert np.abs(twice - once).max() < 1e-10


def test_zero_pyramid_gives_zero_image(bank_128):
    pyr = analyze(np.zeros((128, 128)), bank_128)
    assert np.abs(synthesize(pyr, bank_128)).max() < 1e-14


def test_shifted_impulse_amplitudes_match(bank_128):
    a = np.zeros((128, 128))
    b = np.zeros((128, 128))
    a[64, 64] = 1.0
    b[64, 67] = 1.0
    pa = analyze(a, bank_128)
    pb = analyze(b, bank_128)
    phase_moved = False
    for key in pa.bands:
        ea = np.sum(np.abs(pa.bands[key]) ** 2)
        eb = np.sum(np.abs(pb.bands[key]) ** 2)
        # amplitude content is shift invariant at every scale
        assert abs(ea - eb) / ea < 1e-10
        if key[0] == 1:  # full-resolution bands: the peak sample too
            peak_a = np.abs(pa.bands[key]).max()
            peak_b = np.abs(pb.bands[key]).max()
            assert abs(peak_a - peak_b) / peak_a < 0.01
            ia = np.unravel_index(np.argmax(np.abs(pa.bands[key])), pa.bands[key].shape)
            if abs(np.angle(pa.bands[key][ia]) - np.angle(pb.bands[key][ia])) > 0.01:
                phase_moved = True
    assert phase_moved  # the translation lives in the phases


def test_horizontal_sinusoid_hits_aligned_orientation(bank_128):
    x = np.arange(128)
    img = np.sin(0.4 * np.pi * x)[np.newaxis, :] * np.ones((128, 1))
    pyr = analyze(img, bank_128)
    energy = np.zeros(bank_128.orientations)
    for (scale, orientation), band in pyr.bands.items():
        energy[orientation] += np.sum(np.abs(band) ** 2)
    # variation along x means the wave normal points along x (orientation 0)
    assert int(np.argmax(energy)) == 0


def test_polar_roundtrip(bank_128):
    rng = np.random.default_rng(2)
    img = rng.random((128, 128))
    pyr = analyze(img, bank_128)
    polar = to_phase_amplitude(pyr)
    back = from_phase_amplitude(polar, pyr.highpass, pyr.lowpass)
    for key in pyr.bands:
        assert np.abs(back.bands[key] - pyr.bands[key]).max() < 1e-12


def test_polar_conventions():
    from accelmag.pyramid import BandDecomposition, SteerablePyramid

    pyr = SteerablePyramid(
        {(1, 0): np.array([[1.0 + 0.0j, 0.0 + 0.0j]])},
        np.zeros((2, 2)),
        np.zeros((2, 2)),
    )
    polar = to_phase_amplitude(pyr)
    amp, phase = polar[(1, 0)]
    assert amp[0, 0] == 1.0 and phase[0, 0] == 0.0
    assert amp[0, 1] == 0.0 and phase[0, 1] == 0.0  # phase of zero is zero
    assert isinstance(polar[(1, 0)], BandDecomposition)


# ---------------------------------------------------------------------------
# Gaussian pyramid


def test_gaussian_pyramid_shapes():
    levels = gaussian_pyramid(np.zeros((64, 64)), 3)
    assert [g.shape for g in levels] == [(64, 64), (32, 32), (16, 16), (8, 8)]


def test_gaussian_pyramid_level_zero_is_input():
    rng = np.random.default_rng(3)
    img = rng.random((32, 32))
    assert np.array_equal(gaussian_pyramid(img, 1)[0], img)


def test_gaussian_pyramid_constant_preserved():
    levels = gaussian_pyramid(np.full((48, 40), 0.37), 3)
    for g in levels:
        assert np.abs(g - 0.37).max() < 1e-12


def test_gaussian_pyramid_reduces_noise_variance():
    rng = np.random.default_rng(4)
    wins = 0
    for _ in range(10):
        img = rng.standard_normal((64, 64))
        levels = gaussian_pyramid(img, 1)
        if levels[1].var() < levels[0].var():
            wins += 1
    assert wins == 10


def test_gaussian_pyramid_too_small():
    with pytest.raises(ValueError, match="too small"):
        gaussian_pyramid(np.zeros((6, 6)), 3)
    with pytest.raises(ValueError):
        gaussian_pyramid(np.zeros((8, 8)), 0)


# ---------------------------------------------------------------------------
# upsampling


def test_upsample_constant_dc_gain():
    out = upsample_to(np.full((8, 8), 0.5), 64, 64, 3)
    assert out.shape == (64, 64)
    assert np.abs(out - 0.5).max() < 1e-10


def test_upsample_zero():
    assert np.all(upsample_to(np.zeros((4, 4)), 16, 16, 2) == 0.0)


def test_upsample_impulse_mass():
    grid = np.zeros((16, 16))
    grid[8, 8] = 1.0
    out = upsample_to(grid, 32, 32, 1)
    # each doubling quadruples the sample count; the integral over the
    # finer grid (cell area 1/4) is what stays fixed
    assert out.sum() == pytest.approx(4.0, abs=1e-6)
    out3 = upsample_to(grid, 128, 128, 3)
    assert out3.sum() == pytest.approx(64.0, abs=1e-6)


def test_upsample_exact_odd_target():
    base = np.linspace(0, 1, 5 * 7).reshape(5, 7)
    out = upsample_to(base, 9, 13, 1)
    assert out.shape == (9, 13)
    # even samples align with the source grid
    assert np.abs(out[::2, ::2] - base[: 5, : 7]).max() < 0.1
