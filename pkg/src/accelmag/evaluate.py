"""Quantitative harness: MSE against ground truth and parameter sweeps.

The sweeps follow the controlled-experiment protocol: render the moving
ball and its analytically magnified ground truth, run each magnification
method tuned to the oscillation frequency, and record the mean squared
error over all samples. Errors are reported in 8-bit squared units
(unit-range MSE times 255^2) so the numbers are readable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .io import FrameSequence
from .magnify import ColorMagnifier
from .synth import BallSpec, reference_ball_spec, render_ball, render_ball_groundtruth
from .temporal import kernel_radius, sigma_from_frequency

BASELINE_HALF_BAND_HZ = 0.5

DEFAULT_METHODS = ("acceleration", "ideal_bandpass", "stft:5", "stft:15", "stft:25")


@dataclass
class SweepTable:
    """Per-method, per-parameter MSE results of one sweep."""

    rows: list = field(default_factory=list)  # (method, param, mse) tuples
    metadata: dict = field(default_factory=dict)

    def add(self, method: str, param: float, value: float) -> None:
        self.rows.append((str(method), float(param), float(value)))

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=lambda r: (r[0], r[1]))

    def methods(self) -> list:
        return sorted({r[0] for r in self.rows})

    def curve(self, method: str):
        """(params, mses) for one method, params strictly increasing."""
        rows = [r for r in self.sorted_rows() if r[0] == method]
        params = np.array([r[1] for r in rows])
        values = np.array([r[2] for r in rows])
        if len(np.unique(params)) != len(params):
            raise ValueError(f"duplicate sweep parameter for method {method!r}")
        return params, values

    def value_at(self, method: str, param: float) -> float:
        for m, p, v in self.rows:
            if m == method and abs(p - param) < 1e-9:
                return v
        raise KeyError(f"no row for ({method!r}, {param})")


def mse(a, b) -> float:
    """Mean squared difference over all samples, in 8-bit squared units."""
    fa = a.frames if isinstance(a, FrameSequence) else np.asarray(a, dtype=np.float64)
    fb = b.frames if isinstance(b, FrameSequence) else np.asarray(b, dtype=np.float64)
    if fa.shape != fb.shape:
        raise ValueError(f"shape mismatch: {fa.shape} vs {fb.shape}")
    total = 0.0
    for t in range(fa.shape[0]):  # per-frame accumulation bounds memory
        diff = fa[t] - fb[t]
        # numpy's pairwise summation: independent of BLAS thread count
        total += float(np.sum(diff * diff))
    return total / fa.size * 255.0**2


def baseline_band(freq_hz: float, fps: float) -> tuple:
    """Pass band tracking the target frequency, +/- 0.5 Hz, clamped."""
    lo = max(0.0, freq_hz - BASELINE_HALF_BAND_HZ)
    hi = min(freq_hz + BASELINE_HALF_BAND_HZ, fps / 2.0)
    return lo, hi


def default_frequency_spec() -> BallSpec:
    """Ball configuration used by the frequency sweep: slow diagonal
    drift (0.5 px/frame) and a clip long enough for the widest kernel."""
    speed = 0.5
    return reference_ball_spec(
        velocity=(speed * 2**-0.5, speed * 2**-0.5), duration_frames=240
    )


def default_speed_spec() -> BallSpec:
    """Ball configuration used by the speed sweep: a larger canvas so
    fast trajectories stay inside the frame for whole cycles."""
    return reference_ball_spec(image_size=(352, 352), start=(14.0, 14.0))


def _check_method(method: str) -> None:
    if method in ("acceleration", "ideal_bandpass"):
        return
    if method.startswith("stft:"):
        int(method.split(":", 1)[1])
        return
    raise ValueError(
        f"unknown method {method!r}; expected acceleration, ideal_bandpass or stft:N"
    )


def run_method(seq: FrameSequence, method: str, freq_hz: float, alpha: float = 8.0, color_level: int = 3) -> FrameSequence:
    """Apply one named magnification method tuned to ``freq_hz``.

    ``identity`` is accepted as the null method and returns the input
    unchanged (the no-magnification floor).
    """
    if method == "identity":
        return seq
    _check_method(method)
    if method == "acceleration":
        spec = "acceleration"
    else:
        lo, hi = baseline_band(freq_hz, seq.fps)
        if method == "ideal_bandpass":
            spec = f"ideal:{lo},{hi}"
        else:
            window = int(method.split(":", 1)[1])
            spec = f"stft:{window},{lo},{hi}"
    est = ColorMagnifier(
        alpha=alpha,
        temporal_filter=spec,
        target_freq_hz=freq_hz,
        color_level=color_level,
    )
    return est.transform(seq)


def _min_duration(methods, freq_hz: float, fps: float) -> int:
    need = 2
    for m in methods:
        if m == "acceleration":
            sigma = sigma_from_frequency(fps, freq_hz)
            need = max(need, 2 * kernel_radius(sigma) + 1)
        elif m.startswith("stft:"):
            need = max(need, int(m.split(":", 1)[1]))
    return need


def _max_duration_inside(spec: BallSpec) -> int:
    """Largest frame count keeping the ball fully inside the image."""
    reach = spec.radius + 1.0
    limit = np.inf
    for axis in (0, 1):
        v = spec.velocity[axis]
        if v == 0:
            continue
        size = spec.image_size[1 - axis]  # velocity is (x, y); size is (h, w)
        room = (size - 1 - reach - spec.start[axis]) / v if v > 0 else (spec.start[axis] - reach) / -v
        limit = min(limit, np.floor(room) + 1)
    return int(limit) if np.isfinite(limit) else spec.duration_frames


def _fit_duration(spec: BallSpec, min_frames: int) -> int:
    """Clip the duration to the trajectory, in whole oscillation cycles."""
    duration = min(spec.duration_frames, _max_duration_inside(spec))
    cycle = spec.fps / spec.intensity_freq_hz
    step = int(round(cycle)) if abs(cycle - round(cycle)) < 1e-9 else 1
    if step <= duration:  # keep whole cycles when at least one fits
        duration = (duration // step) * step
    if duration < min_frames:
        raise ValueError(
            f"trajectory allows only {duration} frames but the filters "
            f"need {min_frames}"
        )
    return duration


def _sweep_point(spec: BallSpec, methods, freq_hz, alpha, color_level, gt_factor):
    rendered = render_ball(spec)
    truth = render_ball_groundtruth(spec, gt_factor)
    results = []
    for method in methods:
        out = run_method(rendered, method, freq_hz, alpha, color_level)
        results.append((method, mse(out, truth)))
        del out
    return results


def _run_points(point_args, n_jobs: int):
    """Evaluate sweep points, optionally in parallel worker processes.

    Points are independent; results keep the submission order, so the
    table is identical for any worker count.
    """
    if n_jobs > 1 and len(point_args) > 1:
        from joblib import Parallel, delayed

        return Parallel(n_jobs=n_jobs)(
            delayed(_sweep_point)(*args) for args in point_args
        )
    return [_sweep_point(*args) for args in point_args]


def run_frequency_sweep(
    methods=DEFAULT_METHODS,
    base_spec: BallSpec | None = None,
    freqs=None,
    alpha: float = 8.0,
    color_level: int = 3,
    gt_factor: float = 4.0,
    n_jobs: int = 1,
) -> SweepTable:
    """MSE of each method while the oscillation frequency varies.

    The ball speed is fixed (0.5 px/frame diagonal by default) and the
    frequency sweeps 0.5 to 7 Hz in 0.25 Hz steps. Every method is
    retuned per point: the acceleration scale follows the frequency rule
    and the baseline bands track the frequency +/- 0.5 Hz.
    """
    for m in methods:
        _check_method(m)
    if base_spec is None:
        base_spec = default_frequency_spec()
    if freqs is None:
        freqs = np.arange(0.5, 7.0 + 1e-9, 0.25)
    table = SweepTable(
        metadata={
            "sweep": "frequency",
            "alpha": f"{alpha:g}",
            "color_level": str(color_level),
            "gt_factor": f"{gt_factor:g}",
            "image_size": f"{base_spec.image_size[0]}x{base_spec.image_size[1]}",
            "speed_px_per_frame": f"{np.hypot(*base_spec.velocity):.6g}",
            "duration_frames": str(base_spec.duration_frames),
            "fps": f"{base_spec.fps:g}",
        }
    )
    params = []
    points = []
    for freq in freqs:
        freq = float(freq)
        spec = replace(base_spec, intensity_freq_hz=freq)
        duration = _fit_duration(spec, _min_duration(methods, freq, spec.fps))
        spec = replace(spec, duration_frames=duration)
        params.append(freq)
        points.append((spec, methods, freq, alpha, color_level, gt_factor))
    for freq, results in zip(params, _run_points(points, n_jobs)):
        for method, value in results:
            table.add(method, freq, value)
    return table


def run_speed_sweep(
    methods=DEFAULT_METHODS,
    base_spec: BallSpec | None = None,
    speeds=None,
    alpha: float = 8.0,
    color_level: int = 3,
    gt_factor: float = 4.0,
    n_jobs: int = 1,
) -> SweepTable:
    """MSE of each method while the ball speed varies.

    The oscillation frequency is fixed (2 Hz by default) and the diagonal
    speed sweeps 0 to 7 px/frame in 0.25 steps. Fast trajectories that
    would leave the image shorten the clip to whole oscillation cycles.
    """
    for m in methods:
        _check_method(m)
    if base_spec is None:
        base_spec = default_speed_spec()
    if speeds is None:
        speeds = np.arange(0.0, 7.0 + 1e-9, 0.25)
    freq = base_spec.intensity_freq_hz
    table = SweepTable(
        metadata={
            "sweep": "speed",
            "alpha": f"{alpha:g}",
            "color_level": str(color_level),
            "gt_factor": f"{gt_factor:g}",
            "image_size": f"{base_spec.image_size[0]}x{base_spec.image_size[1]}",
            "intensity_freq_hz": f"{freq:g}",
            "max_duration_frames": str(base_spec.duration_frames),
            "fps": f"{base_spec.fps:g}",
        }
    )
    min_frames = _min_duration(methods, freq, base_spec.fps)
    params = []
    points = []
    for speed in speeds:
        speed = float(speed)
        spec = replace(
            base_spec, velocity=(speed * 2**-0.5, speed * 2**-0.5)
        )
        spec = replace(spec, duration_frames=_fit_duration(spec, min_frames))
        params.append(speed)
        points.append((spec, methods, freq, alpha, color_level, gt_factor))
    for speed, results in zip(params, _run_points(points, n_jobs)):
        for method, value in results:
            table.add(method, speed, value)
    return table


def emit_csv(table: SweepTable, path: str, gnuplot: bool = False) -> None:
    """Write the table; rows ordered by method then parameter.

    Values are printed with 12 significant digits, so a round-trip parse
    recovers them to better than 1e-9 relative. ``gnuplot=True`` writes
    whitespace columns in blank-line separated per-method blocks instead
    of CSV.
    """
    rows = table.sorted_rows()
    lines = []
    if gnuplot:
        current = None
        for method, param, value in rows:
            if method != current:
                if current is not None:
                    lines.append("")
                    lines.append("")
                lines.append(f"# method: {method}")
                current = method
            lines.append(f"{param:.12g} {value:.12g}")
    else:
        lines.append("method,param,mse")
        for method, param, value in rows:
            lines.append(f"{method},{param:.12g},{value:.12g}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
