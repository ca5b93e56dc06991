"""Deterministic synthetic slab fixtures with known ground-truth codes.

Fixtures mimic the photographed side of a granite slab: a speckled gray
face with horizontal spray-paint bands near the top or bottom edge.  Bands
can carry wire-cut gaps, weathering (alpha fade toward the stone), and
global brightness / hue shifts, so detector behavior can be studied without
the proprietary factory photos.

Every byte of a fixture is determined by its parameters and 64-bit seed; the
noise source is numpy's PCG64 generator, which has a published, stable
algorithm.  Paint colors are placed at the centers of the shipped detector
ranges so that clean fixtures are detectable by construction (black paint
sits at the dark end of its value window instead: the stone face must stay
brighter than any shifted black band, or a global brightness drop would make
the two inseparable).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import default_config
from .errors import ParamError
from .imgio import save_image

__all__ = [
    "SynthParams",
    "SynthProfile",
    "FixtureRecord",
    "PROFILES",
    "generate_slab",
    "generate_dataset",
    "palette_rgb",
]

# Achromatic granite face: value-noise in this window keeps the stone
# brighter than every possible black-band pixel even at brightness -40/+40.
BG_V_LO = 140
BG_V_HI = 175
_BG_CELL = 32  # value-noise lattice cell, source pixels

# Paint palette as (h half-degrees, s, v); one entry per digit.
_PALETTE_HSV = {
    0: (0.0, 0.0, 8.0),  # black: neutral, near the dark end of its window
    1: (10.0, 152.0, 96.0),  # brown (fresh/dark variant)
    2: (3.0, 174.0, 176.0),  # red (low-hue variant)
    3: (10.5, 183.5, 185.5),  # orange
    4: (33.0, 162.0, 148.5),  # yellow
    5: (60.0, 157.5, 127.5),  # green
    6: (95.0, 184.0, 127.5),  # blue
    7: (137.5, 138.0, 168.0),  # purple
}

CODE_DIGITS = "01234567"


@dataclass(frozen=True)
class SynthParams:
    """Layout and degradation parameters of one synthetic slab image."""

    width: int = 900
    height: int = 2600
    band_count: int = 5
    anchor: str = "top"
    band_height: int = 90
    band_spacing: int = 500
    band_width: int = 600
    edge_margin: int = 120
    gap_probability: float = 0.0
    fade: float = 0.0
    brightness_shift: int = 0
    hue_jitter: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ParamError("image must be at least 64x64")
        if self.band_count < 1:
            raise ParamError("band_count must be >= 1")
        if self.anchor not in ("top", "bottom"):
            raise ParamError(f"anchor '{self.anchor}' must be top or bottom")
        if self.band_spacing <= self.band_height:
            raise ParamError("band_spacing must exceed band_height")
        if not 0.0 <= self.gap_probability <= 1.0:
            raise ParamError("gap_probability outside [0, 1]")
        if not 0.0 <= self.fade <= 1.0:
            raise ParamError("fade outside [0, 1]")
        if not -64 <= self.brightness_shift <= 64:
            raise ParamError("brightness_shift outside [-64, 64]")
        if self.band_width < 32 or self.band_width > self.width:
            raise ParamError("band_width outside [32, width]")


@dataclass(frozen=True)
class SynthProfile:
    """Per-image parameter ranges used when generating a whole dataset."""

    fade: float = 0.0
    brightness_mag: int = 0
    hue_jitter_mag: float = 0.0
    gap_probability: float = 0.5
    band_count: int = 5


PROFILES = {
    "clean": SynthProfile(),
    "noisy": SynthProfile(fade=0.35, brightness_mag=40, hue_jitter_mag=4.0),
}


@dataclass(frozen=True)
class FixtureRecord:
    """Provenance of one generated fixture; regenerates the image exactly."""

    path: str
    code: str
    anchor: str
    params: SynthParams


def palette_rgb(digit: int, hue_jitter: float = 0.0, brightness_shift: int = 0) -> tuple[int, int, int]:
    """Reference paint RGB of a digit, with optional global shifts applied."""
    h, s, v = _PALETTE_HSV[digit]
    h = (h + hue_jitter) % 180.0
    v = min(255.0, max(0.0, v + brightness_shift))
    r, g, b = _hsv_to_rgb_float(h, s, v)
    return (int(math.floor(r + 0.5)), int(math.floor(g + 0.5)), int(math.floor(b + 0.5)))


def generate_slab(code: str, params: SynthParams) -> tuple[np.ndarray, FixtureRecord]:
    """Render one slab image carrying ``code`` as horizontal paint bands.

    Bands are placed from the anchored edge at ``band_spacing`` intervals, in
    reading order (top band first for a top anchor, bottom band first for a
    bottom anchor).  Raises ParamError when the code does not fit the layout.
    """
    _check_code(code)
    span = params.edge_margin + (len(code) - 1) * params.band_spacing + params.band_height
    if span > params.height - 8:
        raise ParamError(
            f"code of length {len(code)} does not fit: needs {span}px of {params.height}px"
        )

    rng = np.random.default_rng(params.noise_seed)
    gray = _granite_face(params.width, params.height, params.brightness_shift, rng)
    img = np.repeat(gray[:, :, None], 3, axis=2)

    for i, ch in enumerate(code):
        digit = int(ch)
        if params.anchor == "top":
            y0 = params.edge_margin + i * params.band_spacing
        else:
            y0 = params.height - params.edge_margin - params.band_height - i * params.band_spacing
        x_center = (params.width - params.band_width) // 2
        x0 = x_center + int(rng.integers(-40, 41))
        x0 = min(max(x0, 8), params.width - params.band_width - 8)

        paint = np.array(
            _hsv_to_rgb_float(
                (_PALETTE_HSV[digit][0] + params.hue_jitter) % 180.0,
                _PALETTE_HSV[digit][1],
                min(255.0, max(0.0, _PALETTE_HSV[digit][2] + params.brightness_shift)),
            )
        )

        cols = np.ones(params.band_width, dtype=bool)
        if rng.random() < params.gap_probability:
            n_gaps = 1 + int(rng.random() < 0.3)
            for _ in range(n_gaps):
                gap_w = int(rng.integers(30, 61))
                lo = params.band_width // 5
                hi = params.band_width - params.band_width // 5 - gap_w
                gap_x = int(rng.integers(lo, hi + 1))
                cols[gap_x : gap_x + gap_w] = False

        band = img[y0 : y0 + params.band_height, x0 : x0 + params.band_width].astype(np.float64)
        blended = (1.0 - params.fade) * paint[None, None, :] + params.fade * band
        band[:, cols] = blended[:, cols]
        img[y0 : y0 + params.band_height, x0 : x0 + params.band_width] = np.floor(band + 0.5).astype(
            np.uint8
        )

    record = FixtureRecord(path="", code=code, anchor=params.anchor, params=params)
    return img, record


def generate_dataset(
    n: int,
    split_ratio: float,
    seed: int,
    out_dir: str | Path,
    profile: str | SynthProfile = "clean",
) -> tuple[Path, list[FixtureRecord]]:
    """Write ``n`` fixtures plus a manifest.csv; returns the manifest path.

    Codes, anchors, per-image shifts, and split membership are all drawn
    deterministically from ``seed``.
    """
    if n < 2:
        raise ParamError("need at least 2 fixtures to split")
    if not 0.0 < split_ratio < 1.0:
        raise ParamError("split_ratio must be in (0, 1)")
    if isinstance(profile, str):
        try:
            profile = PROFILES[profile]
        except KeyError:
            raise ParamError(f"unknown profile '{profile}' (use {sorted(PROFILES)})") from None

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    records: list[FixtureRecord] = []
    for i in range(n):
        code = "".join(str(d) for d in rng.integers(0, 8, size=profile.band_count))
        anchor = "top" if rng.random() < 0.5 else "bottom"
        shift = int(rng.integers(-profile.brightness_mag, profile.brightness_mag + 1)) if profile.brightness_mag else 0
        jitter = float(rng.uniform(-profile.hue_jitter_mag, profile.hue_jitter_mag)) if profile.hue_jitter_mag else 0.0
        params = SynthParams(
            band_count=profile.band_count,
            anchor=anchor,
            gap_probability=profile.gap_probability,
            fade=profile.fade,
            brightness_shift=shift,
            hue_jitter=jitter,
            noise_seed=int(rng.integers(0, 2**63)),
        )
        name = f"fixture_{i:04d}.png"
        img, record = generate_slab(code, params)
        save_image(img, out / name)
        records.append(replace(record, path=name))

    train_count = math.floor(n * split_ratio + 0.5)
    order = rng.permutation(n)
    split_of = {}
    for rank, idx in enumerate(order):
        split_of[int(idx)] = "train" if rank < train_count else "validation"

    manifest_path = out / "manifest.csv"
    with manifest_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "code", "crop_x", "crop_y", "crop_w", "crop_h", "anchor", "split"])
        for i, rec in enumerate(records):
            writer.writerow([rec.path, rec.code, "", "", "", "", rec.anchor, split_of[i]])
    return manifest_path, records


def validate_palette() -> None:
    """Check the generator's contract against the shipped detector config.

    Every paint must fall inside (only) its own color's threshold rows, and
    the granite face must stay outside every row.  Raises AssertionError on
    violation; cheap enough to run once per process.
    """
    from .colorspace import rgb_to_hsv, Rgb8

    config = default_config()
    for digit, _ in sorted(_PALETTE_HSV.items()):
        rgb = palette_rgb(digit)
        hsv = rgb_to_hsv(Rgb8(*rgb))
        own = [r.spec for r in config.rows if r.spec.digit == digit]
        others = [r.spec for r in config.rows if r.spec.digit != digit]
        if not any(_in_any_range(hsv, s) for s in own):
            raise AssertionError(f"paint for digit {digit} {rgb} -> {hsv} misses its own ranges")
        hit = [s.name for s in others if _in_any_range(hsv, s)]
        if hit:
            raise AssertionError(f"paint for digit {digit} {rgb} also matches {hit}")

    for v in (BG_V_LO, (BG_V_LO + BG_V_HI) // 2, BG_V_HI):
        hsv = rgb_to_hsv(Rgb8(v, v, v))
        hit = [r.spec.name for r in config.rows if _in_any_range(hsv, r.spec)]
        if hit:
            raise AssertionError(f"granite gray {v} matches {hit}")


def _in_any_range(hsv, spec) -> bool:
    return any(
        r.h_min <= hsv.h <= r.h_max and r.s_min <= hsv.s <= r.s_max and r.v_min <= hsv.v <= r.v_max
        for r in spec.ranges
    )


def _check_code(code: str) -> None:
    if not code:
        raise ParamError("code must be non-empty")
    bad = set(code) - set(CODE_DIGITS)
    if bad:
        raise ParamError(f"code '{code}' contains invalid digits {sorted(bad)}")


def _granite_face(width: int, height: int, brightness_shift: int, rng: np.random.Generator) -> np.ndarray:
    """Neutral speckled stone: smooth value-noise plus per-pixel grain."""
    gh = height // _BG_CELL + 2
    gw = width // _BG_CELL + 2
    lattice = rng.uniform(0.0, 1.0, size=(gh, gw))

    ys = np.arange(height) / _BG_CELL
    xs = np.arange(width) / _BG_CELL
    y0 = ys.astype(np.intp)
    x0 = xs.astype(np.intp)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    field = (
        lattice[y0][:, x0] * (1 - fy) * (1 - fx)
        + lattice[y0][:, x0 + 1] * (1 - fy) * fx
        + lattice[y0 + 1][:, x0] * fy * (1 - fx)
        + lattice[y0 + 1][:, x0 + 1] * fy * fx
    )
    grain = rng.uniform(0.0, 8.0, size=(height, width))
    v = BG_V_LO + field * (BG_V_HI - BG_V_LO - 8) + grain + brightness_shift
    return np.clip(np.floor(v + 0.5), 0, 255).astype(np.uint8)


def _hsv_to_rgb_float(h_half: float, s: float, v: float) -> tuple[float, float, float]:
    """Inverse HSV transform used only for paint construction."""
    h_deg = (h_half * 2.0) % 360.0
    s_f = s / 255.0
    v_f = v / 255.0
    c = v_f * s_f
    hp = h_deg / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    if hp < 1:
        r1, g1, b1 = c, x, 0.0
    elif hp < 2:
        r1, g1, b1 = x, c, 0.0
    elif hp < 3:
        r1, g1, b1 = 0.0, c, x
    elif hp < 4:
        r1, g1, b1 = 0.0, x, c
    elif hp < 5:
        r1, g1, b1 = x, 0.0, c
    else:
        r1, g1, b1 = c, 0.0, x
    m = v_f - c
    return ((r1 + m) * 255.0, (g1 + m) * 255.0, (b1 + m) * 255.0)
