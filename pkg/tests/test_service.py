import csv
import io
import math

import pytest
from fastapi.testclient import TestClient
from PIL import Image

from slabcode import service as service_mod
from slabcode.config import default_config
from slabcode.service import create_app


def png_bytes(rgb) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture()
def client(tmp_path):
    app = create_app(corrections_file=tmp_path / "corrections.csv")
    with TestClient(app) as c:
        c.corrections_path = tmp_path / "corrections.csv"
        yield c


def upload(client, data: bytes, **fields):
    return client.post(
        "/api/decode",
        files={"image": ("slab.png", data, "image/png")},
        data={k: v for k, v in fields.items() if v is not None},
    )


class TestHealthAndConfig:
    def test_healthz(self, client):
        assert client.get("/healthz").status_code == 200

    def test_config_legend_has_eight_colors(self, client):
        payload = client.get("/api/config").json()
        colors = payload["colors"]
        assert len(colors) == 8
        assert [c["digit"] for c in colors] == list(range(8))
        assert colors[0]["name"] == "black"
        assert colors[0]["swatch"] == "#000000"
        assert colors[7]["name"] == "purple"

    def test_renamed_color_reflected(self, tmp_path):
        from dataclasses import replace

        cfg = default_config()
        rows = tuple(
            replace(row, spec=replace(row.spec, name="violet"), label="violet")
            if row.spec.name == "purple" else row
            for row in cfg.rows
        )
        app = create_app(config=replace(cfg, rows=rows), corrections_file=tmp_path / "c.csv")
        with TestClient(app) as client:
            names = [c["name"] for c in client.get("/api/config").json()["colors"]]
        assert "violet" in names and "purple" not in names


class TestDecodeEndpoint:
    def test_decodes_fixture(self, client, make_fixture):
        _, img, _ = make_fixture("22475", noise_seed=61)
        resp = upload(client, png_bytes(img))
        assert resp.status_code == 200
        body = resp.json()
        assert body["code"] == "22475"
        assert body["direction"] == "down"
        assert len(body["bands"]) == 5
        h, w = img.shape[:2]
        for band in body["bands"]:
            rect = band["rect"]
            assert 0 <= rect["x_min"] <= rect["x_max"] < w
            assert 0 <= rect["y_min"] <= rect["y_max"] < h
        assert "black" in body["mask_counts"]

    def test_tiny_image_is_422_with_report(self, client):
        import numpy as np

        resp = upload(client, png_bytes(np.full((1, 1, 3), 200, dtype=np.uint8)))
        assert resp.status_code == 422
        assert "mask_counts" in resp.json()

    def test_text_upload_is_400(self, client):
        resp = upload(client, b"this is not an image")
        assert resp.status_code == 400

    def test_oversize_is_413(self, client, monkeypatch):
        monkeypatch.setattr(service_mod, "MAX_UPLOAD_BYTES", 1024)
        import numpy as np

        rng = np.random.default_rng(1)
        noisy = rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8)
        resp = upload(client, png_bytes(noisy))
        assert resp.status_code == 413

    def test_crop_excluding_bands_is_422(self, client, make_fixture):
        _, img, rec = make_fixture("23457", noise_seed=62)
        h, w = img.shape[:2]
        resp = upload(client, png_bytes(img), crop=f"0,{h - 200},{w},200")
        assert resp.status_code == 422

    def test_bad_crop_is_400(self, client, make_fixture):
        _, img, _ = make_fixture("162", noise_seed=63)
        assert upload(client, png_bytes(img), crop="0,0,999999,10").status_code == 400
        assert upload(client, png_bytes(img), crop="nope").status_code == 400

    def test_bad_anchor_is_400(self, client, make_fixture):
        _, img, _ = make_fixture("162", noise_seed=64)
        assert upload(client, png_bytes(img), anchor="sideways").status_code == 400

    def test_coordinate_roundtrip_through_crop(self, client, make_fixture):
        _, img, _ = make_fixture("23457", noise_seed=65)
        cfg = default_config()
        resp = upload(client, png_bytes(img))
        assert resp.status_code == 200
        band = resp.json()["bands"][0]
        r = band["rect"]
        h, w = img.shape[:2]
        pad = 10
        crop = (
            max(0, r["x_min"] - pad),
            max(0, r["y_min"] - pad),
            min(w, r["x_max"] + pad) - max(0, r["x_min"] - pad),
            min(h, r["y_max"] + pad) - max(0, r["y_min"] - pad),
        )
        resp2 = upload(client, png_bytes(img), crop=",".join(str(v) for v in crop))
        assert resp2.status_code == 200
        r2 = resp2.json()["bands"][0]["rect"]
        # blur radius plus one pixel of crop rounding, mapped to original scale
        tol = math.ceil((cfg.kernel().radius + 1) / cfg.scale_factor)
        for key in ("x_min", "x_max", "y_min", "y_max"):
            assert abs(r2[key] - r[key]) <= tol, key


class TestCorrectionsEndpoint:
    def test_valid_correction_appends_manifest_row(self, client):
        record = {
            "image": "slab_001.png",
            "machine_code": "23457",
            "human_code": "23457",
            "crop": {"x": 10, "y": 20, "w": 300, "h": 200},
            "anchor": "top",
        }
        resp = client.post("/api/corrections", json=record)
        assert resp.status_code == 201
        with client.corrections_path.open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        row = rows[0]
        assert row["path"] == "slab_001.png"
        assert row["code"] == "23457"
        assert row["machine_code"] == "23457"
        assert row["split"] == "train"
        assert row["crop_x"] == "10"
        assert row["timestamp"]

    def test_two_corrections_grow_file(self, client):
        record = {"image": "a.png", "human_code": "162", "machine_code": "162"}
        assert client.post("/api/corrections", json=record).status_code == 201
        assert client.post("/api/corrections", json=record).status_code == 201
        with client.corrections_path.open() as fh:
            assert len(list(csv.DictReader(fh))) == 2

    def test_invalid_digits_are_422(self, client):
        resp = client.post("/api/corrections", json={"image": "a.png", "human_code": "9abc"})
        assert resp.status_code == 422

    def test_bad_anchor_is_422(self, client):
        resp = client.post(
            "/api/corrections",
            json={"image": "a.png", "human_code": "123", "anchor": "sideways"},
        )
        assert resp.status_code == 422

    def test_unwritable_store_is_500(self, tmp_path):
        app = create_app(corrections_file=tmp_path)  # a directory: append will fail
        with TestClient(app) as client:
            resp = client.post("/api/corrections", json={"image": "a.png", "human_code": "1"})
        assert resp.status_code == 500

    def test_corrections_file_loads_as_manifest(self, client, make_fixture, tmp_path):
        from slabcode.trainer import load_manifest

        path, _, _ = make_fixture("305", noise_seed=66)
        record = {"image": str(path), "machine_code": "305", "human_code": "305", "anchor": "top"}
        assert client.post("/api/corrections", json=record).status_code == 201
        # corrections rows carry split=train and resolve like manifest entries
        manifest = load_manifest(client.corrections_path)
        assert manifest.entries[0].code == "305"
        assert manifest.entries[0].split == "train"
