"""Turn detected bands into the numeric traceability code.

Bands anchored near the top of the slab read downward, bands near the bottom
read upward; the band colors then map to digits through the fixed key
(black=0 .. purple=7).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .banddetect import BandDetection, detect_all_detailed
from .colorspace import convert_image_to_hsv
from .config import AppConfig, default_config
from .errors import ConfigError, NoBandsError, ParamError
from .raster import CropRect, crop, scale_down

__all__ = [
    "Direction",
    "DigitKey",
    "DecodeResult",
    "PipelineTransform",
    "reading_direction",
    "decode",
    "decode_image",
    "compute_pipeline_transform",
]

DEFAULT_DIGIT_KEY_ORDER = ("black", "brown", "red", "orange", "yellow", "green", "blue", "purple")


class Direction(enum.Enum):
    DOWNWARD = "down"
    UPWARD = "up"


@dataclass(frozen=True)
class DigitKey:
    """Bijection between the eight color names and digits 0-7."""

    mapping: dict[str, int]

    def __post_init__(self):
        digits = sorted(self.mapping.values())
        if len(self.mapping) != 8 or digits != list(range(8)):
            raise ConfigError("digit key must map exactly 8 names onto digits 0-7")

    @classmethod
    def default(cls) -> "DigitKey":
        return cls({name: i for i, name in enumerate(DEFAULT_DIGIT_KEY_ORDER)})

    def digit_of(self, name: str) -> int:
        return self.mapping[name]

    def name_of(self, digit: int) -> str:
        for name, d in self.mapping.items():
            if d == digit:
                return name
        raise KeyError(digit)


@dataclass(frozen=True)
class DecodeResult:
    """The decoded code plus the per-band evidence, in reading order."""

    code: str
    direction: Direction
    bands: tuple[BandDetection, ...]
    warnings: tuple[str, ...] = ()
    mask_counts: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class PipelineTransform:
    """Geometry linking pipeline space (scaled, cropped) to the original image."""

    scale_x: float
    scale_y: float
    crop_scaled: CropRect | None
    original_size: tuple[int, int]  # (width, height)
    pipeline_size: tuple[int, int]

    def to_original_x(self, x: float) -> float:
        off = self.crop_scaled.x if self.crop_scaled else 0
        return (x + off) / self.scale_x

    def to_original_y(self, y: float) -> float:
        off = self.crop_scaled.y if self.crop_scaled else 0
        return (y + off) / self.scale_y


def reading_direction(bands: list[BandDetection] | tuple[BandDetection, ...], image_height: int) -> Direction:
    """Downward when the bands sit in the top half of the image, else upward.

    The mean band center decides; a mean exactly on the midline counts as
    bottom-anchored (upward).
    """
    if not bands:
        raise NoBandsError("cannot infer reading direction without bands")
    mean_y = sum(b.y_center for b in bands) / len(bands)
    return Direction.DOWNWARD if mean_y < image_height / 2.0 else Direction.UPWARD


def decode(
    bands: list[BandDetection] | tuple[BandDetection, ...],
    direction: Direction,
    key: DigitKey | None = None,
) -> DecodeResult:
    """Order bands along the reading direction and concatenate their digits."""
    if not bands:
        raise NoBandsError("cannot decode an empty band list")
    if key is None:
        key = DigitKey.default()
    ordered = sorted(bands, key=lambda b: (b.y_center, b.member_rects[0].x_min))
    if direction is Direction.UPWARD:
        ordered = ordered[::-1]
    warnings = []
    for a, b in zip(ordered, ordered[1:]):
        if a.y_center == b.y_center and a.digit == b.digit:
            warnings.append(
                f"duplicate {a.color_name} bands at y={a.y_center:.1f}"
            )
    code = "".join(str(key.digit_of(b.color_name)) for b in ordered)
    return DecodeResult(
        code=code,
        direction=direction,
        bands=tuple(ordered),
        warnings=tuple(warnings),
    )


def decode_image(
    rgb: np.ndarray,
    crop_rect: CropRect | None = None,
    config: AppConfig | None = None,
    anchor: str | None = None,
) -> DecodeResult:
    """Full pipeline: scale, crop, HSV, detect all colors, order, decode.

    ``crop_rect`` is given in original-image coordinates and is mapped onto
    the scaled picture.  ``anchor`` overrides the config policy ("auto" infers
    the reading direction from band positions; "top"/"bottom" pin it).

    Raises NoBandsError (with the per-color mask report) when nothing is found.
    """
    if config is None:
        config = default_config()
    transform = compute_pipeline_transform(rgb.shape[1], rgb.shape[0], crop_rect, config.scale_factor)
    scaled = scale_down(rgb, config.scale_factor)
    if transform.crop_scaled is not None:
        scaled = crop(scaled, transform.crop_scaled)
    hsv = convert_image_to_hsv(scaled)
    bands, detections = detect_all_detailed(hsv, config.specs, config.kernel())

    mask_counts: dict[str, int] = {}
    warnings: list[str] = []
    for det in detections:
        mask_counts[det.spec.name] = mask_counts.get(det.spec.name, 0) + det.mask_count
        if det.spec.ca > 0 and abs(det.mask_count - det.spec.ca) <= 0.1 * det.spec.ca:
            warnings.append(
                f"{det.spec.name} mask count {det.mask_count} within 10% of area gate {det.spec.ca}"
            )

    if not bands:
        raise NoBandsError(report={"mask_counts": mask_counts})

    policy = anchor if anchor is not None else config.anchor
    if policy == "top":
        direction = Direction.DOWNWARD
    elif policy == "bottom":
        direction = Direction.UPWARD
    elif policy == "auto":
        direction = reading_direction(bands, hsv.shape[0])
    else:
        raise ParamError(f"anchor policy '{policy}' not one of ('auto', 'top', 'bottom')")

    key = DigitKey({spec.name: spec.digit for spec in config.specs})
    result = decode(bands, direction, key)
    return DecodeResult(
        code=result.code,
        direction=result.direction,
        bands=result.bands,
        warnings=tuple(warnings) + result.warnings,
        mask_counts=mask_counts,
    )


def compute_pipeline_transform(
    width: int,
    height: int,
    crop_rect: CropRect | None,
    factor: float,
) -> PipelineTransform:
    """Scaled dimensions and the crop window mapped into scaled space."""
    out_h = max(1, math.floor(factor * height + 0.5))
    out_w = max(1, math.floor(factor * width + 0.5))
    scale_x = out_w / width
    scale_y = out_h / height
    crop_scaled = None
    pipe_w, pipe_h = out_w, out_h
    if crop_rect is not None:
        crop_rect.check_within(width, height)
        x = min(out_w - 1, math.floor(crop_rect.x * scale_x))
        y = min(out_h - 1, math.floor(crop_rect.y * scale_y))
        w = max(1, min(out_w - x, math.floor(crop_rect.w * scale_x + 0.5)))
        h = max(1, min(out_h - y, math.floor(crop_rect.h * scale_y + 0.5)))
        crop_scaled = CropRect(x, y, w, h)
        pipe_w, pipe_h = w, h
    return PipelineTransform(
        scale_x=scale_x,
        scale_y=scale_y,
        crop_scaled=crop_scaled,
        original_size=(width, height),
        pipeline_size=(pipe_w, pipe_h),
    )
