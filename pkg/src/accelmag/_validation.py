"""Input validation helpers shared by the estimators and pipelines."""

from __future__ import annotations

import numpy as np


def check_frame_array(frames) -> np.ndarray:
    """Coerce to a (T, H, W, C) float64 array and validate basic shape."""
    arr = np.asarray(frames, dtype=np.float64)
    if arr.ndim == 3:
        arr = arr[..., np.newaxis]
    if arr.ndim != 4:
        raise ValueError(
            f"expected frames with shape (T, H, W, C), got shape {arr.shape}"
        )
    if arr.shape[0] < 1:
        raise ValueError("frame stack is empty")
    if arr.shape[3] not in (1, 3):
        raise ValueError(f"expected 1 or 3 channels, got {arr.shape[3]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("frames contain non-finite samples")
    return arr


def check_fps(fps) -> float:
    if fps is None:
        raise ValueError("fps is required (pass fps= or use a FrameSequence)")
    fps = float(fps)
    if not fps > 0:
        raise ValueError(f"fps must be positive, got {fps}")
    return fps


def check_positive(value, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_non_negative(value, name: str) -> float:
    value = float(value)
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return value
