"""Command-line interface: magnify, synth-ball and evaluate subcommands.

Every run writes a plain-text key=value manifest recording the resolved
parameters (including the derived temporal scale), the paths and the
tool version, so results stay reproducible and greppable. Timing fields
sit on their own lines; everything else is byte-stable across runs.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import time
import warnings
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .evaluate import DEFAULT_METHODS, emit_csv, run_frequency_sweep, run_speed_sweep
from .io import load_frames, save_frames
from .magnify import (
    ColorMagnifier,
    MotionMagnifier,
    default_thread_count,
    parse_filter_spec,
)
from .synth import BallSpec, render_ball, render_ball_groundtruth, spec_to_text
from .temporal import sigma_from_frequency

# Named parameter profiles (alpha, target frequency Hz, sigma frames, fps).
# Profile sigma wins over the frequency rule; a warning is printed when
# the two disagree.
PRESETS = {
    "light-bulb": (20.0, 60.0, 2.95, 1000.0),
    "baby": (100.0, 2.5, 6.63, 30.0),
    "gun": (8.0, 20.0, 4.24, 480.0),
    "synthetic-ball": (8.0, 2.0, 5.30, 60.0),
    "cat-toy": (4.0, 3.0, 1.41, 240.0),
    "parkinson-1": (3.0, 3.0, 2.12, 30.0),
    "parkinson-2": (4.0, 3.0, 2.12, 30.0),
    "drone": (5.0, 5.0, 1.06, 30.0),
    "water-bottle": (4.0, 2.0, 2.83, 30.0),
}


def _pair(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected X,Y but got {text!r}")
    return (float(parts[0]), float(parts[1]))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="accelmag",
        description="Eulerian video acceleration magnification",
    )
    parser.add_argument("--version", action="version", version=f"accelmag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    mag = sub.add_parser("magnify", help="magnify motion or color changes")
    mag.add_argument("--mode", choices=("motion", "color"), required=True)
    mag.add_argument(
        "--filter",
        dest="filter_spec",
        default="acceleration",
        help="acceleration | ideal:LO,HI | stft:N,LO,HI",
    )
    mag.add_argument("--alpha", type=float, help="magnification factor")
    mag.add_argument("--freq", type=float, help="target frequency in Hz")
    mag.add_argument("--fps", type=float, help="frame rate (mandatory for image input)")
    mag.add_argument("--sigma", type=float, help="override the temporal scale in frames")
    mag.add_argument("--level", type=int, default=3, help="Gaussian pyramid level (color mode)")
    mag.add_argument("--luma-only", action="store_true", help="process only the luma channel")
    mag.add_argument("--orientations", type=int, default=8)
    mag.add_argument("--octave-fraction", type=float, default=0.5)
    mag.add_argument("--depth", type=int, help="steerable pyramid depth")
    mag.add_argument("--preset", choices=sorted(PRESETS))
    mag.add_argument("--threads", type=int, help="worker threads (default: hardware)")
    mag.add_argument("--input", required=True, help="frame dir, pattern or .y4m file")
    mag.add_argument("--output", required=True, help="frame dir, pattern or .y4m file")

    ball = sub.add_parser("synth-ball", help="render the synthetic ball sequence")
    ball.add_argument("--output", required=True, help="output frame directory")
    ball.add_argument("--size", default="256,256", type=_pair, help="H,W in pixels")
    ball.add_argument("--radius", type=float, default=10.0)
    ball.add_argument("--start", type=_pair, default=(20.0, 20.0), help="X,Y in pixels")
    ball.add_argument("--velocity", type=_pair, help="VX,VY in px/frame")
    ball.add_argument("--speed", type=float, help="diagonal speed in px/frame")
    ball.add_argument("--base", type=float, default=0.5, help="base intensity in [0,1]")
    ball.add_argument("--amplitude", type=float, default=20.0, help="oscillation amplitude, 8-bit units")
    ball.add_argument("--freq", type=float, default=2.0, help="oscillation frequency in Hz")
    ball.add_argument("--fps", type=float, default=60.0)
    ball.add_argument("--frames", type=int, default=120)
    ball.add_argument("--background", type=float, default=0.0)
    ball.add_argument("--gt-factor", type=float, help="render the ground truth with this amplitude factor")

    ev = sub.add_parser("evaluate", help="run the synthetic benchmark sweeps")
    ev.add_argument("--sweep", choices=("frequency", "speed"), required=True)
    ev.add_argument("--methods", default=",".join(DEFAULT_METHODS))
    ev.add_argument("--step", type=float, default=0.25, help="sweep parameter step")
    ev.add_argument("--alpha", type=float, default=8.0)
    ev.add_argument("--level", type=int, default=3)
    ev.add_argument("--gt-factor", type=float, default=4.0)
    ev.add_argument("--size", type=int, help="override the square image size in pixels")
    ev.add_argument("--duration", type=int, help="override the clip length in frames")
    ev.add_argument("--threads", type=int, help="parallel sweep-point workers")
    ev.add_argument("--gnuplot", action="store_true", help="gnuplot block layout instead of CSV")
    ev.add_argument("--output", required=True, help="output table path")
    return parser


def _write_manifest(path: str, entries: dict, started: float) -> None:
    stamp = datetime.fromtimestamp(started, timezone.utc).isoformat()
    lines = [f"{key}={value}" for key, value in entries.items()]
    lines.append(f"started_at={stamp}")
    lines.append(f"duration_s={time.time() - started:.3f}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _manifest_path(output: str) -> str:
    if re.search(r"%0?\d*d", output):
        return os.path.join(os.path.dirname(output) or ".", "manifest.txt")
    if output.endswith(".y4m") or "." in os.path.basename(output):
        return output + ".manifest.txt"
    os.makedirs(output, exist_ok=True)
    return os.path.join(output, "manifest.txt")


def _cmd_magnify(args, parser) -> int:
    started = time.time()
    alpha, freq, sigma, fps = args.alpha, args.freq, args.sigma, args.fps
    sigma_source = "override" if sigma is not None else "formula"
    if args.preset:
        p_alpha, p_freq, p_sigma, p_fps = PRESETS[args.preset]
        alpha = p_alpha if alpha is None else alpha
        freq = p_freq if freq is None else freq
        fps = p_fps if fps is None else fps
        if sigma is None:
            sigma = p_sigma
            sigma_source = "preset"
            formula = sigma_from_frequency(fps, freq)
            if abs(formula - sigma) > 0.005:
                warnings.warn(
                    f"preset sigma {sigma:g} differs from fps/(4 w sqrt(2)) "
                    f"= {formula:.4f}; using the preset value"
                )
    filt = parse_filter_spec(args.filter_spec)
    if args.mode == "motion" and filt.kind != "acceleration":
        parser.error("motion mode supports --filter acceleration only")
    if alpha is None:
        parser.error("--alpha is required (or use --preset)")
    needs_freq = filt.kind == "acceleration" and sigma is None
    if needs_freq and freq is None:
        parser.error("--freq is required for the acceleration filter (or give --sigma)")
    if fps is None and not args.input.endswith(".y4m"):
        parser.error("--fps is mandatory for image-sequence input")

    seq = load_frames(args.input, fps)
    threads = args.threads if args.threads else default_thread_count()
    if args.mode == "motion":
        est = MotionMagnifier(
            alpha=alpha,
            target_freq_hz=freq,
            sigma=sigma,
            orientations=args.orientations,
            octave_fraction=args.octave_fraction,
            depth=args.depth,
            luma_only=args.luma_only,
            n_threads=threads,
        )
    else:
        est = ColorMagnifier(
            alpha=alpha,
            temporal_filter=filt,
            target_freq_hz=freq,
            sigma=sigma,
            color_level=args.level,
            luma_only=args.luma_only,
        )
    result = est.fit(seq).transform(seq)

    output = args.output
    if args.input.endswith(".y4m") and "." not in output.rsplit("/", 1)[-1]:
        output = output + ".y4m"  # mirror the input container
    save_frames(result, output)

    entries = {
        "subcommand": "magnify",
        "version": __version__,
        "mode": args.mode,
        "filter": str(filt),
        "alpha": f"{alpha:g}",
        "fps": f"{seq.fps:g}",
        "luma_only": str(args.luma_only).lower(),
        "threads": str(threads),
        "input": args.input,
        "output": output,
    }
    if freq is not None:
        entries["target_freq_hz"] = f"{freq:g}"
    if filt.kind == "acceleration":
        resolved = sigma if sigma is not None else sigma_from_frequency(seq.fps, freq)
        entries["sigma"] = f"{resolved:.6f}"
        entries["sigma_source"] = sigma_source
    if args.mode == "motion":
        entries["orientations"] = str(args.orientations)
        entries["octave_fraction"] = f"{args.octave_fraction:g}"
        entries["depth"] = "auto" if args.depth is None else str(args.depth)
    else:
        entries["color_level"] = str(args.level)
    _write_manifest(_manifest_path(output), entries, started)
    return 0


def _cmd_synth_ball(args, parser) -> int:
    started = time.time()
    if args.velocity is not None and args.speed is not None:
        parser.error("--velocity and --speed are mutually exclusive")
    if args.velocity is not None:
        velocity = args.velocity
    elif args.speed is not None:
        velocity = (args.speed * 2**-0.5, args.speed * 2**-0.5)
    else:
        velocity = (2**-0.5, 2**-0.5)
    spec = BallSpec(
        image_size=(int(args.size[0]), int(args.size[1])),
        radius=args.radius,
        start=args.start,
        velocity=velocity,
        base_intensity=args.base,
        intensity_amplitude=args.amplitude,
        intensity_freq_hz=args.freq,
        fps=args.fps,
        duration_frames=args.frames,
        background=args.background,
    )
    if args.gt_factor is not None:
        seq = render_ball_groundtruth(spec, args.gt_factor)
    else:
        seq = render_ball(spec)
    save_frames(seq, args.output)
    os.makedirs(args.output, exist_ok=True)
    with open(os.path.join(args.output, "ballspec.txt"), "w", encoding="ascii") as fh:
        fh.write(spec_to_text(spec))
        if args.gt_factor is not None:
            fh.write(f"gt_factor={args.gt_factor:g}\n")
    entries = {
        "subcommand": "synth-ball",
        "version": __version__,
        "output": args.output,
        "frames": str(spec.duration_frames),
        "fps": f"{spec.fps:g}",
    }
    _write_manifest(os.path.join(args.output, "manifest.txt"), entries, started)
    return 0


def _cmd_evaluate(args, parser) -> int:
    from .evaluate import default_frequency_spec, default_speed_spec

    started = time.time()
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if not methods:
        parser.error("--methods must name at least one method")
    if args.sweep == "frequency":
        base = default_frequency_spec()
    else:
        base = default_speed_spec()
    if args.size is not None:
        base = replace(base, image_size=(args.size, args.size))
    if args.duration is not None:
        base = replace(base, duration_frames=args.duration)
    n_jobs = args.threads if args.threads else default_thread_count()
    if args.sweep == "frequency":
        params = np.arange(0.5, 7.0 + 1e-9, args.step)
        table = run_frequency_sweep(
            methods, base_spec=base, freqs=params, alpha=args.alpha,
            color_level=args.level, gt_factor=args.gt_factor, n_jobs=n_jobs,
        )
    else:
        params = np.arange(0.0, 7.0 + 1e-9, args.step)
        table = run_speed_sweep(
            methods, base_spec=base, speeds=params, alpha=args.alpha,
            color_level=args.level, gt_factor=args.gt_factor, n_jobs=n_jobs,
        )
    emit_csv(table, args.output, gnuplot=args.gnuplot)
    entries = {
        "subcommand": "evaluate",
        "version": __version__,
        "methods": ",".join(methods),
        "step": f"{args.step:g}",
        "alpha": f"{args.alpha:g}",
        "color_level": str(args.level),
        "gt_factor": f"{args.gt_factor:g}",
        "output": args.output,
    }
    entries.update({f"sweep_{k}": v for k, v in sorted(table.metadata.items())})
    _write_manifest(args.output + ".manifest.txt", entries, started)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "magnify":
            return _cmd_magnify(args, parser)
        if args.command == "synth-ball":
            return _cmd_synth_ball(args, parser)
        return _cmd_evaluate(args, parser)
    except SystemExit:
        raise
    except Exception as exc:  # processing failure, not an argument error
        print(f"accelmag: error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
