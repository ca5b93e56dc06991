"""Parameter training and evaluation over a labeled image manifest.

Each of the ten threshold rows is tuned by grid search against the training
split: a candidate row is scored by how often the merged detection for its
color finds exactly as many bands as the ground-truth code demands.  Ties
break on fewer false-positive bands (on images without the color), then
smaller HSV volume, then lexicographically smallest parameters, so a search
is fully deterministic.

Grids whose cross product fits a budget are enumerated exhaustively; larger
grids fall back to coordinate descent over the axes, two sweeps.  Candidate
evaluations are independent and can fan out over a process pool; the argmax
reduction does not depend on evaluation order.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .banddetect import (
    ColorSpec,
    bands_from_stage,
    compute_mask_stage,
    detect_all_detailed,
    detect_color_detailed,
    merge_paired_bands,
)
from .colorspace import convert_image_to_hsv
from .config import AppConfig, LabeledSpec, default_config
from .decoder import Direction, compute_pipeline_transform, decode, reading_direction
from .errors import EmptySplitError, ManifestError, ParamError
from .imgio import load_image
from .raster import CropRect, GaussianKernel, crop, scale_down

log = logging.getLogger(__name__)

__all__ = [
    "ManifestEntry",
    "DatasetManifest",
    "load_manifest",
    "PreparedImage",
    "prepare_images",
    "ColorEval",
    "evaluate_color",
    "Axis",
    "RangeAxes",
    "ParamGrid",
    "GridSearchResult",
    "grid_search",
    "train_all",
    "ImageOutcome",
    "CombinedEval",
    "evaluate_full",
    "EvalReport",
    "build_report",
]

SPLITS = ("train", "validation")
ANCHORS = ("top", "bottom", "auto")
MANIFEST_COLUMNS = ["path", "code", "crop_x", "crop_y", "crop_w", "crop_h", "anchor", "split"]

DEFAULT_EXHAUSTIVE_BUDGET = 20_000


# ---------------------------------------------------------------------------
# Manifest

@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    code: str
    crop: CropRect | None
    anchor: str
    split: str


@dataclass(frozen=True)
class DatasetManifest:
    source: Path
    entries: tuple[ManifestEntry, ...]

    def split(self, name: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == name]


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse and validate a manifest CSV; image paths resolve relative to it.

    Extra columns are tolerated (correction logs carry a few more); rows with
    unknown digits, bad crops, or missing image files are rejected with their
    line number or path.
    """
    path = Path(path)
    if not path.exists():
        raise ManifestError(f"manifest not found: {path}")
    entries = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in MANIFEST_COLUMNS if c not in header]
        if missing:
            raise ManifestError(f"manifest missing columns {missing}", line=1)
        for row in reader:
            entries.append(_parse_row(row, reader.line_num, path.parent))
    return DatasetManifest(source=path, entries=tuple(entries))


def _parse_row(row: dict, line: int, base: Path) -> ManifestEntry:
    code = (row.get("code") or "").strip()
    if not code or any(c not in "01234567" for c in code):
        raise ManifestError(f"code '{code}' must use digits 0-7", line=line)
    anchor = (row.get("anchor") or "").strip() or "auto"
    if anchor not in ANCHORS:
        raise ManifestError(f"anchor '{anchor}' not one of {ANCHORS}", line=line)
    split = (row.get("split") or "").strip()
    if split not in SPLITS:
        raise ManifestError(f"split '{split}' not one of {SPLITS}", line=line)

    crop_fields = [(row.get(k) or "").strip() for k in ("crop_x", "crop_y", "crop_w", "crop_h")]
    if any(crop_fields) and not all(crop_fields):
        raise ManifestError("crop fields must be all set or all empty", line=line)
    rect = None
    if all(crop_fields):
        try:
            x, y, w, h = (int(v) for v in crop_fields)
            rect = CropRect(x, y, w, h)
        except (ValueError, ParamError) as exc:
            raise ManifestError(f"bad crop: {exc}", line=line) from exc

    img_path = Path((row.get("path") or "").strip())
    if not img_path.is_absolute():
        img_path = base / img_path
    if not img_path.exists():
        raise ManifestError(f"image file not found: {img_path}", line=line)
    return ManifestEntry(path=img_path, code=code, crop=rect, anchor=anchor, split=split)


# ---------------------------------------------------------------------------
# Prepared pipeline inputs

@dataclass(frozen=True)
class PreparedImage:
    """One manifest image taken through the spec-independent pipeline prefix."""

    path: str
    code: str
    anchor: str
    hsv: np.ndarray


def prepare_images(manifest: DatasetManifest, split: str, config: AppConfig) -> list[PreparedImage]:
    """Scale, crop and HSV-convert every image of a split once."""
    entries = manifest.split(split)
    if not entries:
        raise EmptySplitError(f"manifest has no '{split}' images")
    prepared = []
    for e in entries:
        rgb = load_image(e.path)
        scaled = scale_down(rgb, config.scale_factor)
        if e.crop is not None:
            t = compute_pipeline_transform(rgb.shape[1], rgb.shape[0], e.crop, config.scale_factor)
            scaled = crop(scaled, t.crop_scaled)
        prepared.append(
            PreparedImage(path=str(e.path), code=e.code, anchor=e.anchor, hsv=convert_image_to_hsv(scaled))
        )
    return prepared


# ---------------------------------------------------------------------------
# Per-color evaluation

@dataclass(frozen=True)
class ColorEval:
    """Success of one color's detection over a split."""

    name: str
    digit: int
    images: int
    successes: int
    rate: float
    band_errors: int
    fp_bands: int
    seconds: float


def evaluate_color(
    specs: ColorSpec | Sequence[ColorSpec],
    manifest: DatasetManifest,
    split: str,
    config: AppConfig | None = None,
) -> ColorEval:
    """Rate one color (all its threshold rows together) against a split.

    An image counts as a success iff the merged detection finds exactly as
    many bands of the color as the code's digit multiplicity.
    """
    if config is None:
        config = default_config()
    group = [specs] if isinstance(specs, ColorSpec) else list(specs)
    prepared = prepare_images(manifest, split, config)
    return evaluate_color_prepared(group, prepared, config.kernel())


def evaluate_color_prepared(
    group: Sequence[ColorSpec],
    prepared: Sequence[PreparedImage],
    kernel: GaussianKernel,
) -> ColorEval:
    digits = {s.digit for s in group}
    if len(digits) != 1:
        raise ParamError("evaluate_color expects specs sharing one digit")
    digit = digits.pop()
    digit_str = str(digit)
    start = time.perf_counter()

    qualifying = [p for p in prepared if digit_str in p.code]
    if not qualifying:
        raise EmptySplitError(f"no images in split contain digit {digit}")

    successes = 0
    band_errors = 0
    fp_bands = 0
    for p in prepared:
        found = _count_bands(p.hsv, group, kernel)
        mult = p.code.count(digit_str)
        if mult:
            successes += found == mult
            band_errors += abs(found - mult)
        else:
            fp_bands += found

    return ColorEval(
        name=group[0].name,
        digit=digit,
        images=len(qualifying),
        successes=successes,
        rate=successes / len(qualifying),
        band_errors=band_errors,
        fp_bands=fp_bands,
        seconds=time.perf_counter() - start,
    )


def _count_bands(hsv: np.ndarray, group: Sequence[ColorSpec], kernel: GaussianKernel) -> int:
    dets = [detect_color_detailed(hsv, s, kernel) for s in group]
    return len(merge_paired_bands(dets))


# ---------------------------------------------------------------------------
# Parameter grid

@dataclass(frozen=True)
class Axis:
    """Inclusive sweep of one parameter: lo, lo+step, ... <= hi."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise ParamError(f"axis step {self.step} must be > 0")
        if self.lo > self.hi:
            raise ParamError(f"axis range [{self.lo}, {self.hi}] invalid")

    def values(self) -> list[float]:
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return [self.lo + k * self.step for k in range(n)]


@dataclass(frozen=True)
class RangeAxes:
    h_min: Axis
    h_max: Axis
    s_min: Axis
    s_max: Axis
    v_min: Axis
    v_max: Axis


_RANGE_FIELDS = ("h_min", "s_min", "v_min", "h_max", "s_max", "v_max")


@dataclass(frozen=True)
class ParamGrid:
    """Axes for ca/cr/whr/mvd plus the six HSV bounds of every range."""

    ca: Axis
    cr: Axis
    whr: Axis
    mvd: Axis
    ranges: tuple[RangeAxes, ...]

    def cardinality(self) -> int:
        total = 1
        for _, values, _ in self.axes():
            total *= len(values)
        return total

    def axes(self) -> list[tuple[str, list[float], object]]:
        """(label, values, setter) triples in the canonical parameter order."""
        out = [
            ("ca", self.ca.values(), lambda s, v: replace(s, ca=int(v))),
            ("cr", self.cr.values(), lambda s, v: replace(s, cr=float(v))),
            ("whr", self.whr.values(), lambda s, v: replace(s, whr=float(v))),
            ("mvd", self.mvd.values(), lambda s, v: replace(s, mvd=float(v))),
        ]
        for i, ra in enumerate(self.ranges):
            for field in _RANGE_FIELDS:
                axis: Axis = getattr(ra, field)
                out.append((f"r{i}.{field}", axis.values(), _range_setter(i, field)))
        return out

    @classmethod
    def around(
        cls,
        spec: ColorSpec,
        hue_halfwidth: int = 6,
        sv_halfwidth: int = 64,
        hue_step: int = 1,
        sv_step: int = 8,
    ) -> "ParamGrid":
        """Default grid: geometric gates swept over their full conventional
        ranges, HSV bounds in a neighborhood of the seed spec.

        A saturation/value bound seeded at its domain extreme means "no
        constraint applied so far", so its axis covers the whole side instead
        of a small neighborhood of the extreme; the search can then discover a
        real boundary there (a saturation ceiling is what tells a weak-chroma
        color apart from a strong one in the same hue region).
        """
        ranges = tuple(
            RangeAxes(
                h_min=_axis_around(r.h_min, hue_halfwidth, hue_step, 0, 179),
                h_max=_axis_around(r.h_max, hue_halfwidth, hue_step, 0, 179),
                s_min=_axis_around(r.s_min, sv_halfwidth, sv_step, 0, 255, full_side=True),
                s_max=_axis_around(r.s_max, sv_halfwidth, sv_step, 0, 255, full_side=True),
                v_min=_axis_around(r.v_min, sv_halfwidth, sv_step, 0, 255, full_side=True),
                v_max=_axis_around(r.v_max, sv_halfwidth, sv_step, 0, 255, full_side=True),
            )
            for r in spec.ranges
        )
        return cls(
            ca=Axis(0, 500, 50),
            cr=Axis(0.0, 0.05, 0.01),
            whr=Axis(0.0, 2.0, 0.1),
            mvd=Axis(0.0, 80.0, 2.0),
            ranges=ranges,
        )

    @classmethod
    def from_dict(cls, payload: dict, spec: ColorSpec) -> "ParamGrid":
        """Override axes of the default grid from a JSON-style mapping."""
        base = cls.around(spec)
        overrides = payload.get("ranges", [])
        ranges = []
        for i, ra in enumerate(base.ranges):
            ov = overrides[i] if i < len(overrides) else {}
            ranges.append(
                RangeAxes(**{f: _axis_in(ov, f, getattr(ra, f)) for f in _RANGE_FIELDS})
            )
        return cls(
            ca=_axis_in(payload, "ca", base.ca),
            cr=_axis_in(payload, "cr", base.cr),
            whr=_axis_in(payload, "whr", base.whr),
            mvd=_axis_in(payload, "mvd", base.mvd),
            ranges=tuple(ranges),
        )


def _axis_in(payload: dict, key: str, default: Axis) -> Axis:
    if key in payload:
        lo, hi, step = payload[key]
        return Axis(float(lo), float(hi), float(step))
    return default


_FULL_SIDE_SPAN = 224


def _axis_around(
    seed: int, halfwidth: int, step: int, dom_lo: int, dom_hi: int, full_side: bool = False
) -> Axis:
    if full_side and seed == dom_lo:
        return Axis(float(seed), float(min(dom_hi, seed + _FULL_SIDE_SPAN)), float(step))
    if full_side and seed == dom_hi:
        return Axis(float(max(dom_lo, seed - _FULL_SIDE_SPAN)), float(seed), float(step))
    lo = max(dom_lo, seed - halfwidth)
    lo += (seed - lo) % step
    hi = min(dom_hi, seed + halfwidth)
    hi = seed + ((hi - seed) // step) * step
    return Axis(float(lo), float(hi), float(step))


def _range_setter(index: int, field: str):
    def setter(spec: ColorSpec, value: float) -> ColorSpec:
        ranges = list(spec.ranges)
        ranges[index] = replace(ranges[index], **{field: int(value)})
        return replace(spec, ranges=tuple(ranges))

    return setter


# ---------------------------------------------------------------------------
# Grid search

@dataclass(frozen=True)
class GridSearchResult:
    spec: ColorSpec
    rate: float
    fp_bands: int
    evaluations: int
    cardinality: int
    exhaustive: bool


@dataclass(frozen=True)
class _EvalOutcome:
    valid: bool
    rate: float
    fp_bands: int
    volume: int
    params: tuple

    def key(self):
        # Maximize rate, then fewer false positives, then smaller HSV
        # volume, then lexicographically smallest parameters.
        return (
            self.rate if self.valid else -1.0,
            -self.fp_bands,
            -self.volume,
            tuple(-p for p in self.params),
        )


_INVALID = _EvalOutcome(valid=False, rate=-1.0, fp_bands=0, volume=0, params=())


@dataclass(frozen=True)
class _SearchContext:
    """Everything a worker needs to score one candidate spec.

    The stage cache memoizes the expensive mask/blur/label stage per HSV
    range set; gate and geometry sweeps then cost almost nothing.  Each
    worker process accumulates its own copy.
    """

    prepared: tuple[PreparedImage, ...]
    kernel: GaussianKernel
    partner_dets: tuple  # per image: tuple of the fixed partner rows' detections
    digit: int
    stage_cache: dict


def grid_search(
    initial: ColorSpec,
    grid: ParamGrid,
    manifest: DatasetManifest,
    split: str = "train",
    config: AppConfig | None = None,
    partners: Sequence[ColorSpec] = (),
    budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
    jobs: int = 1,
) -> GridSearchResult:
    """Find the best spec on the grid for the training success condition.

    Exhaustive when the grid cross product is within ``budget`` (exactly
    cardinality() evaluations, no pruning; grid points that violate basic
    range validity are scored as unusable rather than skipped); otherwise
    coordinate descent over the axes in canonical order, two sweeps.
    ``partners`` are the other threshold rows of the same digit, held fixed
    while this row moves.
    """
    if config is None:
        config = default_config()
    prepared = prepare_images(manifest, split, config)
    return grid_search_prepared(
        initial, grid, prepared, config.kernel(), partners=partners, budget=budget, jobs=jobs
    )


def grid_search_prepared(
    initial: ColorSpec,
    grid: ParamGrid,
    prepared: Sequence[PreparedImage],
    kernel: GaussianKernel,
    partners: Sequence[ColorSpec] = (),
    budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
    jobs: int = 1,
) -> GridSearchResult:
    cardinality = grid.cardinality()
    if cardinality == 0:
        raise ParamError("empty parameter grid")
    if not any(str(initial.digit) in p.code for p in prepared):
        raise EmptySplitError(f"no images in split contain digit {initial.digit}")

    partner_dets = tuple(
        tuple(detect_color_detailed(p.hsv, partner, kernel) for partner in partners)
        for p in prepared
    )
    ctx = _SearchContext(tuple(prepared), kernel, partner_dets, initial.digit, stage_cache={})
    exhaustive = cardinality <= budget
    log.info(
        "grid search %s: cardinality %d -> %s (budget %d)",
        initial.name, cardinality, "exhaustive" if exhaustive else "coordinate descent", budget,
    )

    executor = None
    if jobs > 1:
        executor = ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init, initargs=(ctx,))
    try:
        evaluations = 0
        axes = grid.axes()
        if exhaustive:
            candidates = []
            for combo in itertools.product(*(values for _, values, _ in axes)):
                candidates.append(_apply_combo(initial, axes, combo))
            outcomes = _evaluate_many(candidates, ctx, executor)
            evaluations += len(candidates)
            best_spec, best = _pick_best(candidates, outcomes, None, None)
        else:
            best_spec = initial
            best = _evaluate_spec(initial, ctx)
            evaluations += 1
            for _ in range(2):
                for _, values, setter in axes:
                    candidates = []
                    for value in values:
                        try:
                            candidates.append(setter(best_spec, value))
                        except (ParamError, ValueError):
                            candidates.append(None)
                    outcomes = _evaluate_many(candidates, ctx, executor)
                    evaluations += len(candidates)
                    best_spec, best = _pick_best(candidates, outcomes, best_spec, best)
    finally:
        if executor is not None:
            executor.shutdown()

    if best is None or not best.valid:
        raise ParamError("grid contained no valid parameter combination")
    return GridSearchResult(
        spec=best_spec,
        rate=best.rate,
        fp_bands=best.fp_bands,
        evaluations=evaluations,
        cardinality=cardinality,
        exhaustive=exhaustive,
    )


def _apply_combo(initial: ColorSpec, axes, combo) -> ColorSpec | None:
    spec = initial
    for (_, _, setter), value in zip(axes, combo):
        try:
            spec = setter(spec, value)
        except (ParamError, ValueError):
            return None
    return spec


def _spec_params(spec: ColorSpec) -> tuple:
    parts = [spec.ca, spec.cr, spec.whr, spec.mvd]
    for r in spec.ranges:
        parts.extend((r.h_min, r.h_max, r.s_min, r.s_max, r.v_min, r.v_max))
    return tuple(parts)


def _evaluate_spec(spec: ColorSpec | None, ctx: _SearchContext) -> _EvalOutcome:
    if spec is None:
        return _INVALID
    stages = ctx.stage_cache.get(spec.ranges)
    if stages is None:
        stages = [compute_mask_stage(p.hsv, spec.ranges, ctx.kernel) for p in ctx.prepared]
        ctx.stage_cache[spec.ranges] = stages
    digit_str = str(ctx.digit)
    successes = 0
    qualifying = 0
    fp = 0
    for p, stage, partner_det in zip(ctx.prepared, stages, ctx.partner_dets):
        det = bands_from_stage(spec, stage)
        bands = merge_paired_bands([det, *partner_det])
        if digit_str in p.code:
            qualifying += 1
            successes += len(bands) == p.code.count(digit_str)
        else:
            fp += len(bands)
    return _EvalOutcome(
        valid=True,
        rate=successes / qualifying,
        fp_bands=fp,
        volume=spec.hsv_volume(),
        params=_spec_params(spec),
    )


_WORKER_CTX: dict = {}


def _worker_init(ctx: _SearchContext):
    _WORKER_CTX["ctx"] = ctx


def _worker_eval(spec: ColorSpec | None) -> _EvalOutcome:
    return _evaluate_spec(spec, _WORKER_CTX["ctx"])


def _evaluate_many(candidates, ctx: _SearchContext, executor) -> list[_EvalOutcome]:
    if executor is None or len(candidates) < 4:
        return [_evaluate_spec(c, ctx) for c in candidates]
    chunk = max(1, len(candidates) // (executor._max_workers * 4))
    return list(executor.map(_worker_eval, candidates, chunksize=chunk))


def _pick_best(candidates, outcomes, best_spec, best):
    for spec, outcome in zip(candidates, outcomes):
        if spec is None or not outcome.valid:
            continue
        if best is None or outcome.key() > best.key():
            best_spec, best = spec, outcome
    return best_spec, best


# ---------------------------------------------------------------------------
# Whole-config training

def train_all(
    config: AppConfig,
    manifest: DatasetManifest,
    split: str = "train",
    budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
    jobs: int = 1,
    grid_overrides: dict | None = None,
) -> tuple[AppConfig, list[GridSearchResult | None]]:
    """Grid-search every threshold row in order; rows whose digit is absent
    from the split are left untouched."""
    prepared = prepare_images(manifest, split, config)
    kernel = config.kernel()
    results: list[GridSearchResult | None] = []
    for i, row in enumerate(config.rows):
        spec = row.spec
        if not any(str(spec.digit) in p.code for p in prepared):
            log.warning("skipping %s: no %s images contain digit %d", row.label, split, spec.digit)
            results.append(None)
            continue
        if grid_overrides and row.label in grid_overrides:
            grid = ParamGrid.from_dict(grid_overrides[row.label], spec)
        else:
            grid = ParamGrid.around(spec)
        partners = [
            r.spec for j, r in enumerate(config.rows) if j != i and r.spec.digit == spec.digit
        ]
        result = grid_search_prepared(
            spec, grid, prepared, kernel, partners=partners, budget=budget, jobs=jobs
        )
        log.info(
            "%s: rate %.4f (fp %d) after %d evaluations",
            row.label, result.rate, result.fp_bands, result.evaluations,
        )
        config = config.with_spec(i, result.spec)
        results.append(result)
    return config, results


# ---------------------------------------------------------------------------
# Combined evaluation (exact-match success condition)

@dataclass(frozen=True)
class ImageOutcome:
    path: str
    expected: str
    produced: str
    hit: bool


@dataclass(frozen=True)
class CombinedEval:
    split: str
    images: tuple[ImageOutcome, ...]
    exact_matches: int
    rate: float
    seconds: float


def evaluate_full(
    config: AppConfig | Sequence[ColorSpec],
    manifest: DatasetManifest,
    split: str,
) -> CombinedEval:
    """Decode every image of a split and demand whole-string equality.

    A decode counts as a hit only when every digit and its position match
    the ground-truth code; wrong, extra, missing, or out-of-order digits are
    all faults.
    """
    if not isinstance(config, AppConfig):
        rows = tuple(LabeledSpec(spec=s, label=s.name) for s in config)
        config = AppConfig(rows=rows)
    start = time.perf_counter()
    prepared = prepare_images(manifest, split, config)
    kernel = config.kernel()
    outcomes = []
    hits = 0
    for p in prepared:
        produced = decode_prepared(p, config, kernel)
        hit = produced == p.code
        hits += hit
        outcomes.append(ImageOutcome(path=p.path, expected=p.code, produced=produced, hit=hit))
    return CombinedEval(
        split=split,
        images=tuple(outcomes),
        exact_matches=hits,
        rate=hits / len(outcomes),
        seconds=time.perf_counter() - start,
    )


def decode_prepared(p: PreparedImage, config: AppConfig, kernel: GaussianKernel) -> str:
    """Decode an already-prepared image; empty string when no bands found."""
    bands, _ = detect_all_detailed(p.hsv, config.specs, kernel)
    if not bands:
        return ""
    anchor = p.anchor if p.anchor != "auto" else config.anchor
    if anchor == "top":
        direction = Direction.DOWNWARD
    elif anchor == "bottom":
        direction = Direction.UPWARD
    else:
        direction = reading_direction(bands, p.hsv.shape[0])
    return decode(bands, direction).code


# ---------------------------------------------------------------------------
# Report assembly

@dataclass(frozen=True)
class EvalReport:
    split: str
    per_color: tuple[ColorEval, ...]
    combined: CombinedEval

    def to_text(self) -> str:
        lines = [f"split: {self.split}", "", "per-color results:"]
        lines.append(
            f"{'color':<10} {'images':>6} {'success':>8} {'band err':>8} {'fp':>4} {'time(s)':>8}"
        )
        for c in self.per_color:
            lines.append(
                f"{c.name:<10} {c.images:>6} {c.rate:>8.2%} {c.band_errors:>8} {c.fp_bands:>4} {c.seconds:>8.2f}"
            )
        lines += ["", "combined exact-match results:"]
        lines.append(f"{'expected':<12} {'produced':<12} result")
        for img in self.combined.images:
            lines.append(f"{img.expected:<12} {img.produced or '-':<12} {'hit' if img.hit else 'FAULT'}")
        lines.append("")
        lines.append(
            f"exact-match: {self.combined.exact_matches}/{len(self.combined.images)}"
            f" = {self.combined.rate:.2%}"
        )
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        # Timing fields are deliberately excluded: reports must be
        # byte-reproducible across runs.
        return {
            "split": self.split,
            "per_color": [
                {
                    "name": c.name,
                    "digit": c.digit,
                    "images": c.images,
                    "successes": c.successes,
                    "rate": round(c.rate, 6),
                    "band_errors": c.band_errors,
                    "fp_bands": c.fp_bands,
                }
                for c in self.per_color
            ],
            "combined": {
                "total": len(self.combined.images),
                "exact_matches": self.combined.exact_matches,
                "rate": round(self.combined.rate, 6),
                "images": [
                    {
                        "path": Path(i.path).name,
                        "expected": i.expected,
                        "produced": i.produced,
                        "hit": i.hit,
                    }
                    for i in self.combined.images
                ],
            },
        }


def build_report(config: AppConfig, manifest: DatasetManifest, split: str) -> EvalReport:
    """Per-color rates plus the combined exact-match table for one split."""
    prepared = prepare_images(manifest, split, config)
    kernel = config.kernel()
    per_color = []
    for name in config.color_names():
        group = [r.spec for r in config.rows_for_name(name)]
        if not any(str(group[0].digit) in p.code for p in prepared):
            continue
        per_color.append(evaluate_color_prepared(group, prepared, kernel))
    combined = evaluate_full(config, manifest, split)
    return EvalReport(split=split, per_color=tuple(per_color), combined=combined)
