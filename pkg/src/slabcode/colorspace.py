"""RGB to HSV conversion in the 8-bit convention used throughout the pipeline.

Hue is stored in half-degrees, 0-179, so that a full turn of the hue circle
fits in one byte; saturation and value are 0-255.  All thresholds and shipped
parameter tables assume exactly this convention.  (The half-degree storage is
an inference from the parameter table bounds, not something the upstream
method states explicitly.)

Rounding is half-up after double-precision intermediates, which keeps the
scalar and vectorized paths bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParamError

__all__ = ["Rgb8", "Hsv8", "rgb_to_hsv", "convert_image_to_hsv"]


@dataclass(frozen=True)
class Rgb8:
    """One 8-bit RGB pixel; each channel in [0, 255]."""

    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            c = getattr(self, name)
            if not 0 <= c <= 255:
                raise ParamError(f"channel {name}={c} outside [0, 255]")


@dataclass(frozen=True)
class Hsv8:
    """One 8-bit HSV pixel: h in [0, 179] half-degrees, s and v in [0, 255]."""

    h: int
    s: int
    v: int

    def __post_init__(self):
        if not 0 <= self.h <= 179:
            raise ParamError(f"h={self.h} outside [0, 179]")
        for name in ("s", "v"):
            c = getattr(self, name)
            if not 0 <= c <= 255:
                raise ParamError(f"channel {name}={c} outside [0, 255]")


def rgb_to_hsv(p: Rgb8) -> Hsv8:
    """Convert a single RGB pixel to 8-bit HSV.

    v is exactly max(r, g, b).  s is 0 on achromatic input, otherwise
    round(255 * (max - min) / max).  Hue comes from the usual piecewise
    sector formula, scaled to degrees, wrapped to [0, 360), then halved
    and rounded into [0, 179].  The achromatic "undefined" hue maps to 0.
    """
    mx = max(p.r, p.g, p.b)
    mn = min(p.r, p.g, p.b)
    v = mx
    if mx == 0:
        return Hsv8(0, 0, 0)
    delta = mx - mn
    s = _round_half_up(255.0 * delta / mx)
    if delta == 0:
        return Hsv8(0, 0, v)
    if mx == p.r:
        hp = (p.g - p.b) / delta
    elif mx == p.g:
        hp = 2.0 + (p.b - p.r) / delta
    else:
        hp = 4.0 + (p.r - p.g) / delta
    degrees = (hp * 60.0) % 360.0
    h = _round_half_up(degrees / 2.0) % 180
    return Hsv8(h, s, v)


def convert_image_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Convert an (H, W, 3) uint8 RGB array to an (H, W, 3) uint8 HSV array.

    Pixelwise identical to :func:`rgb_to_hsv` applied at every coordinate.
    """
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ParamError(f"expected (H, W, 3) array, got shape {rgb.shape}")
    if rgb.shape[0] < 1 or rgb.shape[1] < 1:
        raise ParamError("image must be at least 1x1")
    arr = rgb.astype(np.float64)
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    mx = np.max(arr, axis=-1)
    mn = np.min(arr, axis=-1)
    delta = mx - mn

    v = mx.astype(np.uint8)

    safe_mx = np.where(mx == 0, 1.0, mx)
    s = np.floor(255.0 * delta / safe_mx + 0.5)
    s = np.where(mx == 0, 0.0, s).astype(np.uint8)

    safe_delta = np.where(delta == 0, 1.0, delta)
    hp = np.where(
        mx == r,
        (g - b) / safe_delta,
        np.where(mx == g, 2.0 + (b - r) / safe_delta, 4.0 + (r - g) / safe_delta),
    )
    degrees = np.mod(hp * 60.0, 360.0)
    h = np.mod(np.floor(degrees / 2.0 + 0.5), 180.0)
    h = np.where(delta == 0, 0.0, h).astype(np.uint8)

    return np.stack([h, s, v], axis=-1)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)
