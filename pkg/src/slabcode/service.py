"""Stateless review API: decode uploads, serve the color legend, log corrections.

Band rectangles are returned in ORIGINAL image coordinates (mapped back
through the crop offset and the scale factor) so a browser can draw overlays
on the photo the operator actually sees.  Corrections append to a CSV whose
rows are loadable as training manifest entries, which closes the loop between
human review and retraining.
"""

from __future__ import annotations

import csv
import math
import threading
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import SWATCHES, AppConfig, default_config
from .decoder import compute_pipeline_transform, decode_image
from .errors import NoBandsError, ParamError
from .imgio import load_image_bytes
from .raster import CropRect
from .synthgen import _hsv_to_rgb_float

MAX_UPLOAD_BYTES = 20 * 1024 * 1024

CORRECTION_COLUMNS = [
    "path", "code", "crop_x", "crop_y", "crop_w", "crop_h", "anchor", "split",
    "machine_code", "timestamp",
]


class CropModel(BaseModel):
    x: int
    y: int
    w: int
    h: int


class CorrectionIn(BaseModel):
    image: str
    human_code: str
    machine_code: str = ""
    crop: CropModel | None = None
    anchor: str = "auto"
    timestamp: str | None = None


def create_app(
    config: AppConfig | None = None,
    corrections_file: str | Path | None = None,
) -> FastAPI:
    if config is None:
        config = default_config()
    corrections_path = Path(
        corrections_file or config.corrections_file or "corrections.csv"
    )
    write_lock = threading.Lock()

    app = FastAPI(title="slabcode review API")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/config")
    def get_config():
        colors = []
        for name in config.color_names():
            rows = config.rows_for_name(name)
            colors.append(
                {
                    "name": name,
                    "digit": rows[0].spec.digit,
                    "swatch": _swatch(name, rows[0].spec),
                    "labels": [r.label for r in rows],
                }
            )
        return {"colors": colors, "scale_factor": config.scale_factor}

    @app.post("/api/decode")
    async def api_decode(
        image: UploadFile = File(...),
        crop: str | None = Form(None),
        anchor: str | None = Form(None),
    ):
        data = await image.read()
        if len(data) > MAX_UPLOAD_BYTES:
            raise HTTPException(status_code=413, detail="image larger than the configured cap")
        try:
            rgb = load_image_bytes(data)
        except ParamError:
            raise HTTPException(status_code=400, detail="payload is not a decodable image") from None

        crop_rect = None
        if crop:
            try:
                x, y, w, h = (int(v) for v in crop.split(","))
                crop_rect = CropRect(x, y, w, h)
                crop_rect.check_within(rgb.shape[1], rgb.shape[0])
            except (ValueError, ParamError) as exc:
                raise HTTPException(status_code=400, detail=f"bad crop: {exc}") from None
        if anchor is not None and anchor not in ("auto", "top", "bottom"):
            raise HTTPException(status_code=400, detail=f"bad anchor '{anchor}'")

        try:
            result = decode_image(rgb, crop_rect=crop_rect, config=config, anchor=anchor)
        except NoBandsError as exc:
            return JSONResponse(
                status_code=422,
                content={"detail": "no bands detected", **exc.report},
            )

        width, height = rgb.shape[1], rgb.shape[0]
        transform = compute_pipeline_transform(width, height, crop_rect, config.scale_factor)
        bands = []
        for b in result.bands:
            x_min = min(r.x_min for r in b.member_rects)
            x_max = max(r.x_max for r in b.member_rects)
            y_min = min(r.y_min for r in b.member_rects)
            y_max = max(r.y_max for r in b.member_rects)
            bands.append(
                {
                    "color": b.color_name,
                    "digit": b.digit,
                    "y": _clamp(transform.to_original_y(b.y_center), 0, height - 1),
                    "rect": {
                        "x_min": _iclamp(transform.to_original_x(x_min), 0, width - 1),
                        "x_max": _iclamp(transform.to_original_x(x_max + 1) - 1, 0, width - 1),
                        "y_min": _iclamp(transform.to_original_y(y_min), 0, height - 1),
                        "y_max": _iclamp(transform.to_original_y(y_max + 1) - 1, 0, height - 1),
                    },
                }
            )
        return {
            "code": result.code,
            "direction": result.direction.value,
            "bands": bands,
            "mask_counts": result.mask_counts,
            "warnings": list(result.warnings),
        }

    @app.post("/api/corrections", status_code=201)
    def api_corrections(correction: CorrectionIn):
        if not correction.human_code or any(c not in "01234567" for c in correction.human_code):
            raise HTTPException(status_code=422, detail="human_code must use digits 0-7")
        if correction.machine_code and any(c not in "01234567" for c in correction.machine_code):
            raise HTTPException(status_code=422, detail="machine_code must use digits 0-7")
        if correction.anchor not in ("auto", "top", "bottom"):
            raise HTTPException(status_code=422, detail=f"bad anchor '{correction.anchor}'")
        stamp = correction.timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
        crop_vals = ["", "", "", ""]
        if correction.crop is not None:
            crop_vals = [
                str(correction.crop.x), str(correction.crop.y),
                str(correction.crop.w), str(correction.crop.h),
            ]
        row = [
            correction.image, correction.human_code, *crop_vals, correction.anchor, "train",
            correction.machine_code, stamp,
        ]
        try:
            with write_lock:
                new_file = not corrections_path.exists()
                with corrections_path.open("a", newline="", encoding="utf-8") as fh:
                    writer = csv.writer(fh)
                    if new_file:
                        writer.writerow(CORRECTION_COLUMNS)
                    writer.writerow(row)
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"cannot write corrections: {exc}") from exc
        return {"stored": True, "file": str(corrections_path)}

    return app


def _swatch(name: str, spec) -> str:
    known = SWATCHES.get(name)
    if known:
        return known
    r0 = spec.ranges[0]
    rgb = _hsv_to_rgb_float(
        (r0.h_min + r0.h_max) / 2.0, (r0.s_min + r0.s_max) / 2.0, (r0.v_min + r0.v_max) / 2.0
    )
    return "#{:02X}{:02X}{:02X}".format(*(int(math.floor(c + 0.5)) for c in rgb))


def _clamp(v: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, round(v, 2)))


def _iclamp(v: float, lo: int, hi: int) -> int:
    return int(max(lo, min(hi, math.floor(v + 0.5))))
