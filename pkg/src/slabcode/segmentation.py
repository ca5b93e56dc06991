"""HSV range masking, connected regions, and rectangle shape filtering.

A color is isolated by one or two inclusive HSV ranges (two when it straddles
the hue wrap or has a weathered variant); the mask is the union.  Regions of
the mask are reduced to their wrapping rectangles, since everything downstream
consumes only the rectangle geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ParamError

__all__ = ["HsvRange", "BoundingRect", "hsv_mask", "connected_components", "filter_by_whr"]

# 8-connectivity: spray-paint edges are diagonal-noisy and 4-connectivity
# splits bands excessively.
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class HsvRange:
    """Inclusive HSV box; hue wraparound is expressed as two ranges, never min > max."""

    h_min: int
    h_max: int
    s_min: int
    s_max: int
    v_min: int
    v_max: int

    def __post_init__(self):
        if not (0 <= self.h_min <= self.h_max <= 179):
            raise ParamError(f"hue range [{self.h_min}, {self.h_max}] invalid")
        for lo, hi, name in (
            (self.s_min, self.s_max, "saturation"),
            (self.v_min, self.v_max, "value"),
        ):
            if not (0 <= lo <= hi <= 255):
                raise ParamError(f"{name} range [{lo}, {hi}] invalid")

    def volume(self) -> int:
        return (
            (self.h_max - self.h_min + 1)
            * (self.s_max - self.s_min + 1)
            * (self.v_max - self.v_min + 1)
        )


@dataclass(frozen=True)
class BoundingRect:
    """Wrapping rectangle of one mask region, in inclusive pixel coordinates."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int
    pixel_count: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ParamError("rect min exceeds max")
        if not 1 <= self.pixel_count <= self.width * self.height:
            raise ParamError("pixel_count inconsistent with rect extent")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def y_center(self) -> float:
        return (self.y_min + self.y_max) / 2.0


def hsv_mask(hsv: np.ndarray, ranges: list[HsvRange] | tuple[HsvRange, ...]) -> np.ndarray:
    """Pixels inside at least one of the HSV ranges.

    Returns an (H, W) bool array; a pixel is on iff h, s and v all fall inside
    one range's inclusive bounds.
    """
    if len(ranges) == 0:
        raise ParamError("at least one HSV range is required")
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    mask = np.zeros(hsv.shape[:2], dtype=bool)
    for r in ranges:
        mask |= (
            (h >= r.h_min)
            & (h <= r.h_max)
            & (s >= r.s_min)
            & (s <= r.s_max)
            & (v >= r.v_min)
            & (v <= r.v_max)
        )
    return mask


def connected_components(mask: np.ndarray) -> list[BoundingRect]:
    """Wrapping rectangles of the 8-connected regions of a boolean mask.

    Each rectangle carries the region's min/max x and y plus its pixel count.
    List order follows label order (top-left first); callers sort as needed.
    """
    labels, count = ndimage.label(mask, structure=_STRUCTURE_8)
    if count == 0:
        return []
    slices = ndimage.find_objects(labels)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    rects = []
    for idx, sl in enumerate(slices, start=1):
        ys, xs = sl
        rects.append(
            BoundingRect(
                x_min=int(xs.start),
                x_max=int(xs.stop - 1),
                y_min=int(ys.start),
                y_max=int(ys.stop - 1),
                pixel_count=int(sizes[idx]),
            )
        )
    return rects


def filter_by_whr(rects: list[BoundingRect], whr: float) -> list[BoundingRect]:
    """Keep rectangles whose width/height ratio is at least ``whr``.

    Rejects tall, narrow regions (shadows, drips) that cannot be bands;
    order is preserved.
    """
    if whr < 0:
        raise ParamError(f"whr {whr} must be >= 0")
    return [r for r in rects if r.width / r.height >= whr]
