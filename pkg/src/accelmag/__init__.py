"""Eulerian video acceleration magnification.

Amplifies small non-linear (accelerating) temporal changes in video,
both motion (via complex steerable pyramid phase) and intensity/color
(via Gaussian pyramid levels), while leaving large linear motion
untouched. Includes the classic linear Eulerian color magnification
baselines and a synthetic benchmark harness.
"""

from .io import (
    FrameSequence,
    load_frames,
    save_frames,
    rgb_to_yiq,
    yiq_to_rgb,
)
from .pyramid import (
    FilterBank,
    SteerablePyramid,
    BandDecomposition,
    build_filter_bank,
    analyze,
    synthesize,
    to_phase_amplitude,
    from_phase_amplitude,
    gaussian_pyramid,
    upsample_to,
)
from .temporal import (
    TemporalKernel,
    sigma_from_frequency,
    log_kernel,
    convolve_time,
    unwrap_phase,
    ideal_bandpass,
    stft_bandpass,
    acceleration_filter,
)
from .magnify import (
    MotionMagnifier,
    ColorMagnifier,
    magnify_motion_acceleration,
    magnify_color_acceleration,
    magnify_color_linear,
    parse_filter_spec,
)
from .synth import (
    BallSpec,
    reference_ball_spec,
    render_ball,
    render_ball_groundtruth,
)
from .evaluate import (
    SweepTable,
    mse,
    run_frequency_sweep,
    run_speed_sweep,
    emit_csv,
)

__version__ = "0.1.0"

__all__ = [
    "FrameSequence",
    "load_frames",
    "save_frames",
    "rgb_to_yiq",
    "yiq_to_rgb",
    "FilterBank",
    "SteerablePyramid",
    "BandDecomposition",
    "build_filter_bank",
    "analyze",
    "synthesize",
    "to_phase_amplitude",
    "from_phase_amplitude",
    "gaussian_pyramid",
    "upsample_to",
    "TemporalKernel",
    "sigma_from_frequency",
    "log_kernel",
    "convolve_time",
    "unwrap_phase",
    "ideal_bandpass",
    "stft_bandpass",
    "acceleration_filter",
    "MotionMagnifier",
    "ColorMagnifier",
    "magnify_motion_acceleration",
    "magnify_color_acceleration",
    "magnify_color_linear",
    "parse_filter_spec",
    "BallSpec",
    "reference_ball_spec",
    "render_ball",
    "render_ball_groundtruth",
    "SweepTable",
    "mse",
    "run_frequency_sweep",
    "run_speed_sweep",
    "emit_csv",
    "__version__",
]
