"""Application configuration: color specs plus pipeline settings.

The compiled-in default is the production parameter set for the eight paint
colors (ten threshold rows: red and brown each carry a second row for their
hue-wrap / weathered variants).  Configs load from and save to a versioned
JSON file; unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .banddetect import DEFAULT_BLUR_SIGMA, DEFAULT_BLUR_SIZE, ColorSpec
from .errors import ConfigError
from .raster import GaussianKernel, make_gaussian_kernel
from .segmentation import HsvRange

__all__ = ["AppConfig", "default_config", "load_config", "save_config", "SWATCHES"]

CONFIG_VERSION = 1
DEFAULT_SCALE_FACTOR = 0.15

ANCHOR_POLICIES = ("auto", "top", "bottom")

# Legend swatches for the digit key, black=0 through purple=7.
SWATCHES = {
    "black": "#000000",
    "brown": "#663300",
    "red": "#FF0000",
    "orange": "#FFA500",
    "yellow": "#FFFF00",
    "green": "#008000",
    "blue": "#0000FF",
    "purple": "#800080",
}

# name, label, digit, ca, cr, whr, mvd, (h_min, s_min, v_min, h_max, s_max, v_max)
_DEFAULT_ROWS = [
    ("black", "black", 0, 50, 0.0, 0.8, 16, (0, 0, 3, 179, 255, 51)),
    ("brown", "dark brown", 1, 300, 0.0, 1.2, 72, (5, 49, 64, 15, 255, 128)),
    ("brown", "light brown", 1, 300, 0.0, 1.2, 72, (14, 74, 132, 18, 255, 165)),
    ("red", "high-hue red", 2, 50, 0.0, 0.4, 22, (171, 100, 103, 179, 255, 255)),
    ("red", "low-hue red", 2, 50, 0.0, 0.4, 30, (1, 93, 97, 5, 255, 255)),
    ("orange", "orange", 3, 250, 0.0, 1.1, 29, (6, 112, 116, 15, 255, 255)),
    ("yellow", "yellow", 4, 150, 0.0, 0.2, 16, (23, 69, 42, 43, 255, 255)),
    ("green", "green", 5, 150, 0.0, 0.8, 18, (40, 60, 0, 80, 255, 255)),
    ("blue", "blue", 6, 100, 0.0, 0.6, 32, (81, 113, 0, 109, 255, 255)),
    ("purple", "purple", 7, 200, 0.0, 0.7, 30, (120, 21, 81, 155, 255, 255)),
]


@dataclass(frozen=True)
class LabeledSpec:
    """One threshold row: a ColorSpec plus its display label."""

    spec: ColorSpec
    label: str


@dataclass(frozen=True)
class AppConfig:
    rows: tuple[LabeledSpec, ...]
    scale_factor: float = DEFAULT_SCALE_FACTOR
    blur_size: int = DEFAULT_BLUR_SIZE
    blur_sigma: float = DEFAULT_BLUR_SIGMA
    anchor: str = "auto"
    corrections_file: str | None = None

    def __post_init__(self):
        if self.anchor not in ANCHOR_POLICIES:
            raise ConfigError(f"anchor policy '{self.anchor}' not one of {ANCHOR_POLICIES}")
        if not 0.0 < self.scale_factor <= 1.0:
            raise ConfigError(f"scale_factor {self.scale_factor} outside (0, 1]")

    @property
    def specs(self) -> tuple[ColorSpec, ...]:
        return tuple(row.spec for row in self.rows)

    def kernel(self) -> GaussianKernel:
        return make_gaussian_kernel(self.blur_size, self.blur_sigma)

    def color_names(self) -> list[str]:
        """Distinct color names in digit order."""
        by_digit = sorted({(r.spec.digit, r.spec.name) for r in self.rows})
        return [name for _, name in by_digit]

    def rows_for_name(self, name: str) -> list[LabeledSpec]:
        return [r for r in self.rows if r.spec.name == name]

    def with_spec(self, index: int, spec: ColorSpec) -> "AppConfig":
        rows = list(self.rows)
        rows[index] = replace(rows[index], spec=spec)
        return replace(self, rows=tuple(rows))


def default_config() -> AppConfig:
    rows = []
    for name, label, digit, ca, cr, whr, mvd, bounds in _DEFAULT_ROWS:
        h0, s0, v0, h1, s1, v1 = bounds
        spec = ColorSpec(
            name=name,
            digit=digit,
            ranges=(HsvRange(h0, h1, s0, s1, v0, v1),),
            ca=ca,
            cr=float(cr),
            whr=float(whr),
            mvd=float(mvd),
        )
        rows.append(LabeledSpec(spec=spec, label=label))
    return AppConfig(rows=tuple(rows))


def load_config(path: str | Path) -> AppConfig:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(payload, source=str(path))


def config_from_dict(payload: dict, source: str = "<config>") -> AppConfig:
    if not isinstance(payload, dict):
        raise ConfigError(f"{source}: top level must be an object")
    allowed = {
        "version",
        "scale_factor",
        "blur_size",
        "blur_sigma",
        "anchor",
        "corrections_file",
        "colors",
    }
    _reject_unknown(payload, allowed, source)
    version = payload.get("version")
    if version != CONFIG_VERSION:
        raise ConfigError(f"{source}: unsupported config version {version!r}")
    colors = payload.get("colors")
    if not isinstance(colors, list) or not colors:
        raise ConfigError(f"{source}: 'colors' must be a non-empty list")
    rows = tuple(_row_from_dict(c, source, i) for i, c in enumerate(colors))
    try:
        return AppConfig(
            rows=rows,
            scale_factor=float(payload.get("scale_factor", DEFAULT_SCALE_FACTOR)),
            blur_size=int(payload.get("blur_size", DEFAULT_BLUR_SIZE)),
            blur_sigma=float(payload.get("blur_sigma", DEFAULT_BLUR_SIGMA)),
            anchor=payload.get("anchor", "auto"),
            corrections_file=payload.get("corrections_file"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _row_from_dict(entry: dict, source: str, index: int) -> LabeledSpec:
    where = f"{source}: colors[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{where}: must be an object")
    allowed = {"name", "label", "digit", "ranges", "ca", "cr", "whr", "mvd"}
    _reject_unknown(entry, allowed, where)
    try:
        ranges = tuple(_range_from_dict(r, where, j) for j, r in enumerate(entry["ranges"]))
        spec = ColorSpec(
            name=str(entry["name"]),
            digit=int(entry["digit"]),
            ranges=ranges,
            ca=int(entry["ca"]),
            cr=float(entry["cr"]),
            whr=float(entry["whr"]),
            mvd=float(entry["mvd"]),
        )
    except KeyError as exc:
        raise ConfigError(f"{where}: missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return LabeledSpec(spec=spec, label=str(entry.get("label", spec.name)))


def _range_from_dict(entry: dict, where: str, index: int) -> HsvRange:
    spot = f"{where}.ranges[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{spot}: must be an object")
    keys = {"h_min", "h_max", "s_min", "s_max", "v_min", "v_max"}
    _reject_unknown(entry, keys, spot)
    missing = keys - entry.keys()
    if missing:
        raise ConfigError(f"{spot}: missing keys {sorted(missing)}")
    try:
        return HsvRange(**{k: int(entry[k]) for k in keys})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{spot}: {exc}") from exc


def _reject_unknown(payload: dict, allowed: set[str], where: str) -> None:
    unknown = set(payload.keys()) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def config_to_dict(config: AppConfig) -> dict:
    return {
        "version": CONFIG_VERSION,
        "scale_factor": config.scale_factor,
        "blur_size": config.blur_size,
        "blur_sigma": config.blur_sigma,
        "anchor": config.anchor,
        "corrections_file": config.corrections_file,
        "colors": [
            {
                "name": row.spec.name,
                "label": row.label,
                "digit": row.spec.digit,
                "ranges": [
                    {
                        "h_min": r.h_min,
                        "h_max": r.h_max,
                        "s_min": r.s_min,
                        "s_max": r.s_max,
                        "v_min": r.v_min,
                        "v_max": r.v_max,
                    }
                    for r in row.spec.ranges
                ],
                "ca": row.spec.ca,
                "cr": row.spec.cr,
                "whr": row.spec.whr,
                "mvd": row.spec.mvd,
            }
            for row in config.rows
        ],
    }


def save_config(config: AppConfig, path: str | Path) -> None:
    text = json.dumps(config_to_dict(config), indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")
