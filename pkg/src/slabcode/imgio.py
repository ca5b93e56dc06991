"""Image file decode/encode at the CLI and service boundary (PNG, PPM, JPEG)."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ParamError

__all__ = ["load_image", "load_image_bytes", "save_image"]


def load_image(path: str | Path) -> np.ndarray:
    """Read an image file into an (H, W, 3) uint8 RGB array."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except FileNotFoundError:
        raise
    except UnidentifiedImageError as exc:
        raise ParamError(f"{path}: not a decodable image") from exc


def load_image_bytes(data: bytes) -> np.ndarray:
    """Decode in-memory PNG/JPEG/PPM bytes into an RGB array."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            return np.asarray(img.convert("RGB"))
    except UnidentifiedImageError as exc:
        raise ParamError("payload is not a decodable image") from exc


def save_image(rgb: np.ndarray, path: str | Path) -> None:
    """Write an RGB array as PNG or binary PPM (P6), chosen by extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    img = Image.fromarray(rgb, mode="RGB")
    if suffix == ".png":
        img.save(path, format="PNG")
    elif suffix in (".ppm", ".pnm"):
        img.save(path, format="PPM")
    else:
        raise ParamError(f"unsupported image extension '{suffix}' (use .png or .ppm)")
