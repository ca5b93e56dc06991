"""Image container conventions and pre-processing primitives.

Images are numpy arrays in row-major order:

* RGB / HSV: ``(H, W, 3) uint8``
* grayscale: ``(H, W) uint8``
* binary mask: ``(H, W) bool``

Every operation is pure: inputs are never mutated and outputs are freshly
allocated, so images can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ParamError

__all__ = [
    "CropRect",
    "GaussianKernel",
    "scale_down",
    "crop",
    "to_grayscale",
    "make_gaussian_kernel",
    "gaussian_blur",
    "binarize",
]

# Luma weights for grayscale conversion (ITU-R BT.601).
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned crop window: top-left corner (x, y) plus extent (w, h)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ParamError(f"crop extent {self.w}x{self.h} must be >= 1x1")
        if self.x < 0 or self.y < 0:
            raise ParamError(f"crop origin ({self.x}, {self.y}) must be >= 0")

    def check_within(self, width: int, height: int) -> None:
        if self.x + self.w > width or self.y + self.h > height:
            raise BoundsError(
                f"crop ({self.x},{self.y},{self.w},{self.h}) exceeds image {width}x{height}"
            )


@dataclass(frozen=True)
class GaussianKernel:
    """Square normalized Gaussian convolution kernel."""

    size: int
    sigma: float
    weights: np.ndarray

    @property
    def radius(self) -> int:
        return (self.size - 1) // 2


def require_image(img: np.ndarray, channels: int | None = 3) -> None:
    """Validate the shape convention of an image array."""
    want = 2 if channels is None else 3
    if img.ndim != want or (channels and img.shape[2] != channels):
        raise ParamError(f"expected {'(H, W)' if channels is None else '(H, W, 3)'} array, got {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ParamError("image must be at least 1x1")


def scale_down(img: np.ndarray, factor: float) -> np.ndarray:
    """Resize an RGB image by ``factor`` in (0, 1] using bilinear interpolation.

    Output dimensions are ``max(1, round(factor * dim))``; sample positions
    use the half-pixel-center convention so that factor 1.0 is the identity.
    """
    require_image(img)
    if not 0.0 < factor <= 1.0:
        raise ParamError(f"scale factor {factor} outside (0, 1]")
    in_h, in_w = img.shape[:2]
    out_h = max(1, math.floor(factor * in_h + 0.5))
    out_w = max(1, math.floor(factor * in_w + 0.5))
    if (out_h, out_w) == (in_h, in_w):
        return img.copy()

    src = img.astype(np.float64)
    ys = _sample_coords(out_h, in_h)
    xs = _sample_coords(out_w, in_w)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None, None]
    fx = (xs - x0)[None, :, None]

    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bot = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    out = top * (1 - fy) + bot * fy
    return np.floor(out + 0.5).astype(np.uint8)


def _sample_coords(out_dim: int, in_dim: int) -> np.ndarray:
    # Half-pixel centers mapped back into source space, clamped to the edge.
    coords = (np.arange(out_dim) + 0.5) * (in_dim / out_dim) - 0.5
    return np.clip(coords, 0.0, in_dim - 1.0)


def crop(img: np.ndarray, rect: CropRect) -> np.ndarray:
    """Extract the sub-image covered by ``rect``; raises BoundsError if outside."""
    if img.ndim not in (2, 3):
        raise ParamError(f"expected image array, got shape {img.shape}")
    rect.check_within(img.shape[1], img.shape[0])
    return img[rect.y : rect.y + rect.h, rect.x : rect.x + rect.w].copy()


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert RGB to 8-bit grayscale with the 0.299/0.587/0.114 luma weights."""
    require_image(img)
    wr, wg, wb = GRAY_WEIGHTS
    arr = img.astype(np.float64)
    gray = wr * arr[..., 0] + wg * arr[..., 1] + wb * arr[..., 2]
    return np.floor(gray + 0.5).astype(np.uint8)


def make_gaussian_kernel(size: int, sigma: float) -> GaussianKernel:
    """Build a normalized ``size`` x ``size`` Gaussian kernel.

    Weights are proportional to exp(-(x^2 + y^2) / (2 sigma^2)) on the integer
    lattice centered at the origin, renormalized to sum to 1.
    """
    if size < 3 or size % 2 == 0:
        raise ParamError(f"kernel size {size} must be an odd integer >= 3")
    if sigma <= 0:
        raise ParamError(f"sigma {sigma} must be positive")
    half = (size - 1) // 2
    coords = np.arange(-half, half + 1, dtype=np.float64)
    xx, yy = np.meshgrid(coords, coords)
    weights = np.exp(-(xx**2 + yy**2) / (2.0 * sigma * sigma))
    weights /= weights.sum()
    weights.setflags(write=False)
    return GaussianKernel(size=size, sigma=float(sigma), weights=weights)


def gaussian_blur(img: np.ndarray, kernel: GaussianKernel) -> np.ndarray:
    """Convolve a grayscale image with ``kernel``, reflecting at the borders.

    Output dimensions match the input; each pixel is the rounded weighted
    average of its neighborhood, so the output range never exceeds the input
    range.
    """
    require_image(img, channels=None)
    r = kernel.radius
    padded = np.pad(img.astype(np.float64), r, mode="symmetric")
    h, w = img.shape
    acc = np.zeros((h, w), dtype=np.float64)
    for dy in range(kernel.size):
        for dx in range(kernel.size):
            acc += kernel.weights[dy, dx] * padded[dy : dy + h, dx : dx + w]
    return np.floor(acc + 0.5).astype(np.uint8)


def binarize(img: np.ndarray) -> np.ndarray:
    """Threshold a grayscale image: any nonzero pixel becomes True."""
    require_image(img, channels=None)
    return img > 0
