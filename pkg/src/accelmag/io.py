"""Frame-sequence I/O and NTSC YIQ color conversion.

Sequences are held in memory as (T, H, W, C) float64 arrays with samples
nominally in [0, 1]. Precision is kept at double until the final write
because the temporal filters downstream amplify quantization noise.
Numbered PNG frames are the lossless interchange default; Y4M streams
are also read and written (4:4:4, full range).
"""

from __future__ import annotations

import glob
import os
import re
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction

import cv2
import numpy as np

from ._validation import check_frame_array, check_fps

# NTSC luma/chroma transform. Rows: Y, I, Q.
RGB_TO_YIQ = np.array(
    [
        [0.299, 0.587, 0.114],
        [0.595716, -0.274453, -0.321263],
        [0.211456, -0.522591, 0.311135],
    ]
)
YIQ_TO_RGB = np.linalg.inv(RGB_TO_YIQ)

# Full-range BT.601 YCbCr, used only for Y4M plane packing.
_RGB_TO_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)
_YCBCR_TO_RGB = np.linalg.inv(_RGB_TO_YCBCR)

_IMAGE_EXTENSIONS = (".png", ".tif", ".tiff", ".bmp", ".jpg", ".jpeg")


@dataclass
class FrameSequence:
    """A time-ordered stack of equally sized frames with a frame rate.

    Attributes
    ----------
    frames : np.ndarray
        (T, H, W, C) float64 samples. RGB samples lie nominally in [0, 1];
        YIQ luma lies in [0, 1] and chroma in the NTSC ranges. Magnified
        sequences may exceed the gamut; clipping happens at write time only.
    fps : float
        Frames per second, > 0.
    colorspace : str
        Either ``"rgb"`` or ``"yiq"``.
    """

    frames: np.ndarray
    fps: float
    colorspace: str = "rgb"

    def __post_init__(self):
        self.frames = check_frame_array(self.frames)
        self.fps = check_fps(self.fps)
        if self.colorspace not in ("rgb", "yiq"):
            raise ValueError(f"unknown colorspace {self.colorspace!r}")

    @property
    def shape(self) -> tuple:
        return self.frames.shape

    def copy(self) -> "FrameSequence":
        return FrameSequence(self.frames.copy(), self.fps, self.colorspace)


def _apply_color_matrix(frames: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    return frames @ matrix.T


def rgb_to_yiq(seq: FrameSequence) -> FrameSequence:
    """Convert an RGB sequence to NTSC YIQ (pure linear map per pixel)."""
    if seq.colorspace != "rgb":
        raise ValueError("rgb_to_yiq expects an RGB sequence")
    if seq.frames.shape[3] != 3:
        raise ValueError("color conversion requires 3 channels")
    return replace(seq, frames=_apply_color_matrix(seq.frames, RGB_TO_YIQ), colorspace="yiq")


def yiq_to_rgb(seq: FrameSequence) -> FrameSequence:
    """Inverse of :func:`rgb_to_yiq`; round-trips to better than 1e-6."""
    if seq.colorspace != "yiq":
        raise ValueError("yiq_to_rgb expects a YIQ sequence")
    return replace(seq, frames=_apply_color_matrix(seq.frames, YIQ_TO_RGB), colorspace="rgb")


# ---------------------------------------------------------------------------
# numbered image sequences


def _numeric_key(path: str):
    """Sort key using the last integer run in the file name."""
    name = os.path.basename(path)
    runs = re.findall(r"\d+", name)
    return (int(runs[-1]) if runs else -1, name)


def _resolve_pattern(path_pattern: str) -> list:
    if os.path.isdir(path_pattern):
        entries = []
        for ext in _IMAGE_EXTENSIONS:
            entries.extend(glob.glob(os.path.join(path_pattern, "*" + ext)))
        return sorted(set(entries), key=_numeric_key)
    if re.search(r"%0?\d*d", path_pattern):
        wildcard = re.sub(r"%0?\d*d", "*", path_pattern)
        return sorted(glob.glob(wildcard), key=_numeric_key)
    if any(ch in path_pattern for ch in "*?["):
        return sorted(glob.glob(path_pattern), key=_numeric_key)
    return [path_pattern] if os.path.exists(path_pattern) else []


def _read_image(path: str) -> np.ndarray:
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IOError(f"could not read image {path!r}")
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise ValueError(f"unsupported bit depth {raw.dtype} in {path!r}")
    if raw.ndim == 2:
        raw = raw[:, :, np.newaxis]
    elif raw.shape[2] == 4:  # drop alpha
        raw = raw[:, :, :3][:, :, ::-1]
    elif raw.shape[2] == 3:  # BGR to RGB
        raw = raw[:, :, ::-1]
    return raw.astype(np.float64) / scale


def load_frames(path_pattern: str, fps: float | None = None) -> FrameSequence:
    """Load a frame sequence from numbered images or a Y4M stream.

    ``path_pattern`` may be a directory of numbered frames, a printf-style
    pattern (``frame_%06d.png``), a glob pattern, a single image, or a
    ``.y4m`` file. ``fps`` is mandatory for image input; for Y4M it
    defaults to the stream header rate.
    """
    if path_pattern.endswith(".y4m"):
        return _load_y4m(path_pattern, fps)
    files = _resolve_pattern(path_pattern)
    if not files:
        raise FileNotFoundError(f"no frames match {path_pattern!r}")
    frames = []
    for f in files:
        img = _read_image(f)
        if frames and img.shape != frames[0].shape:
            raise ValueError(
                f"frame {f!r} has shape {img.shape}, expected {frames[0].shape}"
            )
        frames.append(img)
    return FrameSequence(np.stack(frames), check_fps(fps))


def save_frames(seq: FrameSequence, path_pattern: str) -> None:
    """Write an RGB sequence as 8-bit numbered PNGs or a Y4M stream.

    Out-of-range samples are clipped to [0, 1] with a warning. A load of
    the written files matches ``seq`` to within one 8-bit quantization
    step per sample (PNG path).
    """
    if seq.colorspace != "rgb":
        raise ValueError("save_frames expects an RGB sequence")
    frames = seq.frames
    if np.any(frames < -1e-9) or np.any(frames > 1 + 1e-9):
        warnings.warn("samples outside [0, 1] were clipped on write", stacklevel=2)
    frames = np.clip(frames, 0.0, 1.0)
    if path_pattern.endswith(".y4m"):
        _save_y4m(replace(seq, frames=frames), path_pattern)
        return
    if re.search(r"%0?\d*d", path_pattern):
        fmt = path_pattern
        os.makedirs(os.path.dirname(fmt) or ".", exist_ok=True)
    else:
        os.makedirs(path_pattern, exist_ok=True)
        fmt = os.path.join(path_pattern, "frame_%06d.png")
    quantized = np.rint(frames * 255.0).astype(np.uint8)
    for t in range(quantized.shape[0]):
        img = quantized[t]
        if img.shape[2] == 3:
            img = img[:, :, ::-1]  # RGB to BGR
        else:
            img = img[:, :, 0]
        if not cv2.imwrite(fmt % (t + 1), img):
            raise IOError(f"could not write frame {fmt % (t + 1)!r}")


# ---------------------------------------------------------------------------
# Y4M (YUV4MPEG2), 8-bit planar


def _load_y4m(path: str, fps: float | None) -> FrameSequence:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", "replace").strip()
        if not header.startswith("YUV4MPEG2"):
            raise ValueError(f"{path!r} is not a YUV4MPEG2 stream")
        width = height = None
        rate = None
        subsampling = "420"
        for token in header.split()[1:]:
            if token.startswith("W"):
                width = int(token[1:])
            elif token.startswith("H"):
                height = int(token[1:])
            elif token.startswith("F"):
                num, den = token[1:].split(":")
                rate = float(num) / float(den)
            elif token.startswith("C"):
                subsampling = token[1:]
        if width is None or height is None:
            raise ValueError(f"missing geometry in Y4M header of {path!r}")
        if subsampling.startswith("444"):
            chroma_shape = (height, width)
        elif subsampling.startswith("420"):
            chroma_shape = ((height + 1) // 2, (width + 1) // 2)
        else:
            raise ValueError(f"unsupported Y4M chroma mode C{subsampling}")
        ysize = height * width
        csize = chroma_shape[0] * chroma_shape[1]
        frames = []
        while True:
            marker = fh.readline()
            if not marker:
                break
            if not marker.startswith(b"FRAME"):
                raise ValueError(f"corrupt Y4M frame marker in {path!r}")
            data = fh.read(ysize + 2 * csize)
            if len(data) != ysize + 2 * csize:
                raise ValueError(f"truncated Y4M frame in {path!r}")
            y = np.frombuffer(data[:ysize], np.uint8).reshape(height, width)
            u = np.frombuffer(data[ysize : ysize + csize], np.uint8).reshape(chroma_shape)
            v = np.frombuffer(data[ysize + csize :], np.uint8).reshape(chroma_shape)
            if chroma_shape != (height, width):
                u = u.repeat(2, axis=0)[:height].repeat(2, axis=1)[:, :width]
                v = v.repeat(2, axis=0)[:height].repeat(2, axis=1)[:, :width]
            ycbcr = np.stack([y, u, v], axis=-1).astype(np.float64)
            ycbcr[..., 0] /= 255.0
            ycbcr[..., 1:] = (ycbcr[..., 1:] - 128.0) / 255.0
            rgb = np.clip(ycbcr @ _YCBCR_TO_RGB.T, 0.0, 1.0)
            frames.append(rgb)
    if not frames:
        raise ValueError(f"no frames in {path!r}")
    return FrameSequence(np.stack(frames), check_fps(fps if fps is not None else rate))


def _save_y4m(seq: FrameSequence, path: str) -> None:
    t, h, w, c = seq.frames.shape
    if c == 1:
        frames = np.repeat(seq.frames, 3, axis=3)
    else:
        frames = seq.frames
    rate = Fraction(seq.fps).limit_denominator(65536)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(
            f"YUV4MPEG2 W{w} H{h} F{rate.numerator}:{rate.denominator} "
            f"Ip A1:1 C444 XCOLORRANGE=FULL\n".encode("ascii")
        )
        for i in range(t):
            ycbcr = frames[i] @ _RGB_TO_YCBCR.T
            ycbcr[..., 0] *= 255.0
            ycbcr[..., 1:] = ycbcr[..., 1:] * 255.0 + 128.0
            planes = np.rint(np.clip(ycbcr, 0.0, 255.0)).astype(np.uint8)
            fh.write(b"FRAME\n")
            fh.write(planes[..., 0].tobytes())
            fh.write(planes[..., 1].tobytes())
            fh.write(planes[..., 2].tobytes())
