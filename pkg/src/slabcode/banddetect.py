"""Per-color band detection.

Each color is found by one detection pass: HSV mask, area/ratio gates,
blur + re-binarize to heal spray-paint raggedness, connected rectangles,
width/height-ratio filter, and finally grouping of rectangles that sit at
similar heights into bands (wire-cutting splits a physical band into several
pieces at nearly the same y).

Colors with two threshold rows (red across the hue wrap, weathered vs fresh
brown) run as paired specs sharing one digit; their bands are merged after
detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ParamError
from .raster import GaussianKernel, binarize, gaussian_blur, make_gaussian_kernel
from .segmentation import BoundingRect, HsvRange, connected_components, filter_by_whr, hsv_mask

__all__ = [
    "ColorSpec",
    "BandDetection",
    "ColorDetection",
    "RectGroup",
    "MaskStage",
    "compute_mask_stage",
    "bands_from_stage",
    "detect_color",
    "detect_color_detailed",
    "detect_all",
    "detect_all_detailed",
    "group_by_mvd",
]

DEFAULT_BLUR_SIZE = 5
DEFAULT_BLUR_SIGMA = 1.1


@dataclass(frozen=True)
class ColorSpec:
    """Full parameter set of one color detection function.

    ca is the minimum number of mask pixels for the color to count as present;
    cr the minimum mask fraction of the image (second false-positive gate);
    whr the minimum width/height ratio of a region; mvd the largest vertical
    gap between regions still merged into one band.
    """

    name: str
    digit: int
    ranges: tuple[HsvRange, ...]
    ca: int
    cr: float
    whr: float
    mvd: float

    def __post_init__(self):
        if not 0 <= self.digit <= 7:
            raise ParamError(f"digit {self.digit} outside [0, 7]")
        if not 1 <= len(self.ranges) <= 2:
            raise ParamError(f"{self.name}: expected 1 or 2 HSV ranges, got {len(self.ranges)}")
        if self.ca < 0:
            raise ParamError(f"{self.name}: ca {self.ca} must be >= 0")
        if not 0.0 <= self.cr <= 1.0:
            raise ParamError(f"{self.name}: cr {self.cr} outside [0, 1]")
        if self.whr < 0:
            raise ParamError(f"{self.name}: whr {self.whr} must be >= 0")
        if self.mvd < 0:
            raise ParamError(f"{self.name}: mvd {self.mvd} must be >= 0")

    def hsv_volume(self) -> int:
        return sum(r.volume() for r in self.ranges)


@dataclass(frozen=True)
class BandDetection:
    """One detected color band: digit evidence plus merged geometry."""

    color_name: str
    digit: int
    y_center: float
    member_rects: tuple[BoundingRect, ...]


@dataclass(frozen=True)
class RectGroup:
    """Rectangles grouped into one band by vertical proximity."""

    rects: tuple[BoundingRect, ...]
    y_center: float


@dataclass(frozen=True)
class ColorDetection:
    """Detection result of one spec, with the gate evidence kept around."""

    spec: ColorSpec
    bands: tuple[BandDetection, ...]
    mask_count: int
    mask_ratio: float
    gate_passed: bool


def group_by_mvd(rects: Sequence[BoundingRect], mvd: float) -> list[RectGroup]:
    """Group rectangles whose sorted vertical centers are less than ``mvd`` apart.

    Centers are sorted ascending and adjacent pairs compared: a gap strictly
    below mvd continues the current group, anything else starts a new one.
    Each group's representative y is the mean of its members' centers.
    """
    if mvd < 0:
        raise ParamError(f"mvd {mvd} must be >= 0")
    if not rects:
        return []
    ordered = sorted(rects, key=lambda r: (r.y_center, r.x_min, r.x_max, r.y_min))
    groups: list[list[BoundingRect]] = [[ordered[0]]]
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.y_center - prev.y_center < mvd:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return [
        RectGroup(
            rects=tuple(members),
            y_center=sum(r.y_center for r in members) / len(members),
        )
        for members in groups
    ]


@dataclass(frozen=True)
class MaskStage:
    """Spec-geometry-independent part of one detection: mask statistics plus
    the healed region rectangles.  Reusable across candidates that share the
    same HSV ranges (the trainer sweeps gates far more often than ranges)."""

    count: int
    ratio: float
    rects: tuple[BoundingRect, ...]


def compute_mask_stage(
    hsv: np.ndarray,
    ranges: Sequence[HsvRange],
    kernel: GaussianKernel,
) -> MaskStage:
    """Union mask over ``ranges``, then blur + re-binarize + label regions."""
    if hsv.shape[0] < 1 or hsv.shape[1] < 1:
        raise ParamError("image must be at least 1x1")
    mask = hsv_mask(hsv, ranges)
    count = int(mask.sum())
    ratio = count / mask.size
    if count == 0:
        return MaskStage(count=0, ratio=0.0, rects=())
    gray = mask.astype(np.uint8) * 255
    healed = binarize(gaussian_blur(gray, kernel))
    return MaskStage(count=count, ratio=ratio, rects=tuple(connected_components(healed)))


def bands_from_stage(spec: ColorSpec, stage: MaskStage) -> ColorDetection:
    """Apply the area/ratio gates and geometric filters of one spec."""
    if stage.count < spec.ca or stage.ratio < spec.cr:
        return ColorDetection(spec, (), stage.count, stage.ratio, gate_passed=False)
    rects = filter_by_whr(list(stage.rects), spec.whr)
    groups = group_by_mvd(rects, spec.mvd)
    bands = _sort_bands(
        tuple(
            BandDetection(
                color_name=spec.name,
                digit=spec.digit,
                y_center=g.y_center,
                member_rects=g.rects,
            )
            for g in groups
        )
    )
    return ColorDetection(spec, bands, stage.count, stage.ratio, gate_passed=True)


def detect_color_detailed(
    hsv: np.ndarray,
    spec: ColorSpec,
    kernel: GaussianKernel | None = None,
) -> ColorDetection:
    """Run one color function and keep the mask statistics.

    Pipeline order: union mask over the spec's ranges; reject everything if
    the mask has fewer than ca pixels or covers less than cr of the image;
    blur and re-binarize the mask; connected rectangles; width/height filter;
    vertical grouping.
    """
    if kernel is None:
        kernel = _default_kernel()
    return bands_from_stage(spec, compute_mask_stage(hsv, spec.ranges, kernel))


def detect_color(
    hsv: np.ndarray,
    spec: ColorSpec,
    kernel: GaussianKernel | None = None,
) -> list[BandDetection]:
    """Candidate bands of one color; empty when the color is absent."""
    return list(detect_color_detailed(hsv, spec, kernel).bands)


def detect_all_detailed(
    hsv: np.ndarray,
    specs: Sequence[ColorSpec],
    kernel: GaussianKernel | None = None,
) -> tuple[list[BandDetection], list[ColorDetection]]:
    """Run every color function and merge paired specs that share a digit."""
    _check_digit_names(specs)
    if kernel is None:
        kernel = _default_kernel()
    detections = [detect_color_detailed(hsv, spec, kernel) for spec in specs]
    bands = merge_paired_bands(detections)
    return bands, detections


def detect_all(
    hsv: np.ndarray,
    specs: Sequence[ColorSpec],
    kernel: GaussianKernel | None = None,
) -> list[BandDetection]:
    """All detected bands across the spec set, deterministically ordered."""
    bands, _ = detect_all_detailed(hsv, specs, kernel)
    return bands


def merge_paired_bands(detections: Iterable[ColorDetection]) -> list[BandDetection]:
    """Merge bands of specs sharing a digit; the same physical band may be
    caught by both rows of a pair, at nearly the same height."""
    by_digit: dict[int, list[ColorDetection]] = {}
    for det in detections:
        by_digit.setdefault(det.spec.digit, []).append(det)

    merged: list[BandDetection] = []
    for digit in sorted(by_digit):
        group = by_digit[digit]
        name = group[0].spec.name
        all_bands = [b for det in group for b in det.bands]
        if not all_bands:
            continue
        if len(group) == 1:
            merged.extend(all_bands)
            continue
        mvd = max(det.spec.mvd for det in group)
        rects = [r for band in all_bands for r in band.member_rects]
        for rg in group_by_mvd(rects, mvd):
            merged.append(
                BandDetection(
                    color_name=name,
                    digit=digit,
                    y_center=rg.y_center,
                    member_rects=rg.rects,
                )
            )
    return list(_sort_bands(tuple(merged)))


def _sort_bands(bands: tuple[BandDetection, ...]) -> tuple[BandDetection, ...]:
    return tuple(
        sorted(bands, key=lambda b: (b.y_center, b.member_rects[0].x_min, b.digit))
    )


def _check_digit_names(specs: Sequence[ColorSpec]) -> None:
    digit_names: dict[int, str] = {}
    for spec in specs:
        seen = digit_names.get(spec.digit)
        if seen is not None and seen != spec.name:
            raise ConfigError(
                f"digit {spec.digit} claimed by both '{seen}' and '{spec.name}'"
            )
        digit_names[spec.digit] = spec.name


def _default_kernel() -> GaussianKernel:
    return make_gaussian_kernel(DEFAULT_BLUR_SIZE, DEFAULT_BLUR_SIGMA)
