import json

import pytest

from slabcode.config import (
    AppConfig,
    config_from_dict,
    config_to_dict,
    default_config,
    load_config,
    save_config,
)
from slabcode.errors import ConfigError

# The shipped defaults, frozen: (label, digit, ca, cr, whr, mvd, h0, s0, v0, h1, s1, v1)
EXPECTED_ROWS = [
    ("black", 0, 50, 0.0, 0.8, 16, 0, 0, 3, 179, 255, 51),
    ("dark brown", 1, 300, 0.0, 1.2, 72, 5, 49, 64, 15, 255, 128),
    ("light brown", 1, 300, 0.0, 1.2, 72, 14, 74, 132, 18, 255, 165),
    ("high-hue red", 2, 50, 0.0, 0.4, 22, 171, 100, 103, 179, 255, 255),
    ("low-hue red", 2, 50, 0.0, 0.4, 30, 1, 93, 97, 5, 255, 255),
    ("orange", 3, 250, 0.0, 1.1, 29, 6, 112, 116, 15, 255, 255),
    ("yellow", 4, 150, 0.0, 0.2, 16, 23, 69, 42, 43, 255, 255),
    ("green", 5, 150, 0.0, 0.8, 18, 40, 60, 0, 80, 255, 255),
    ("blue", 6, 100, 0.0, 0.6, 32, 81, 113, 0, 109, 255, 255),
    ("purple", 7, 200, 0.0, 0.7, 30, 120, 21, 81, 155, 255, 255),
]


def test_default_rows_are_the_shipped_table():
    cfg = default_config()
    assert len(cfg.rows) == len(EXPECTED_ROWS)
    for row, expected in zip(cfg.rows, EXPECTED_ROWS):
        label, digit, ca, cr, whr, mvd, h0, s0, v0, h1, s1, v1 = expected
        s = row.spec
        r = s.ranges[0]
        got = (row.label, s.digit, s.ca, s.cr, s.whr, s.mvd,
               r.h_min, r.s_min, r.v_min, r.h_max, r.s_max, r.v_max)
        assert got == (label, digit, ca, cr, whr, mvd, h0, s0, v0, h1, s1, v1)


def test_default_covers_eight_digits():
    cfg = default_config()
    assert cfg.color_names() == ["black", "brown", "red", "orange", "yellow", "green", "blue", "purple"]
    assert sorted({r.spec.digit for r in cfg.rows}) == list(range(8))


def test_roundtrip_through_file(tmp_path):
    cfg = default_config()
    path = tmp_path / "config.json"
    save_config(cfg, path)
    loaded = load_config(path)
    assert loaded == cfg
    save_config(loaded, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_unknown_top_level_key_rejected():
    payload = config_to_dict(default_config())
    payload["surprise"] = 1
    with pytest.raises(ConfigError, match="unknown keys"):
        config_from_dict(payload)


def test_unknown_color_key_rejected():
    payload = config_to_dict(default_config())
    payload["colors"][0]["smoothing"] = 3
    with pytest.raises(ConfigError, match="unknown keys"):
        config_from_dict(payload)


def test_unknown_range_key_rejected():
    payload = config_to_dict(default_config())
    payload["colors"][0]["ranges"][0]["alpha_min"] = 0
    with pytest.raises(ConfigError, match="unknown keys"):
        config_from_dict(payload)


def test_missing_range_key_rejected():
    payload = config_to_dict(default_config())
    del payload["colors"][0]["ranges"][0]["v_max"]
    with pytest.raises(ConfigError, match="missing"):
        config_from_dict(payload)


def test_wrong_version_rejected():
    payload = config_to_dict(default_config())
    payload["version"] = 99
    with pytest.raises(ConfigError, match="version"):
        config_from_dict(payload)


def test_invalid_json_rejected(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(path)


def test_anchor_policy_validated():
    with pytest.raises(ConfigError):
        AppConfig(rows=default_config().rows, anchor="sideways")


def test_scale_factor_validated():
    with pytest.raises(ConfigError):
        AppConfig(rows=default_config().rows, scale_factor=0.0)


def test_kernel_uses_blur_settings():
    cfg = default_config()
    k = cfg.kernel()
    assert k.size == cfg.blur_size
    assert k.sigma == cfg.blur_sigma


def test_config_json_is_versioned(tmp_path):
    path = tmp_path / "c.json"
    save_config(default_config(), path)
    assert json.loads(path.read_text())["version"] == 1
