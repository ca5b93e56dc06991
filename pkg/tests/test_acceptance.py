"""Acceptance suite: one test per criterion, at its stated tolerance.

Each test prints an ``ACCEPTANCE <name>: PASS`` line on success (visible with
``pytest -s`` or in the captured output); pytest's own per-test verdicts give
the pass/fail line per criterion as well.  The expensive synthetic datasets
are generated once per session at fixed seeds.
"""

import colorsys
import math
import time
from collections import Counter

import numpy as np
import pytest

from slabcode.banddetect import group_by_mvd
from slabcode.cli import main as cli_main
from slabcode.colorspace import Rgb8, rgb_to_hsv
from slabcode.config import default_config, load_config
from slabcode.decoder import decode_image
from slabcode.imgio import load_image
from slabcode.raster import make_gaussian_kernel
from slabcode.segmentation import connected_components
from slabcode.synthgen import generate_dataset
from slabcode.trainer import evaluate_full, load_manifest

from test_banddetect import gap_cluster_oracle, rect_at
from test_colorspace import hue_distance, oracle_hsv
from test_segmentation import as_tuples, flood_fill_rects

CLEAN_SEED = 808
NOISY_SEED = 20260809
DETERMINISM_SEED = 4711


@pytest.fixture(scope="session")
def clean130(tmp_path_factory):
    out = tmp_path_factory.mktemp("clean130")
    manifest_path, records = generate_dataset(130, 109 / 130, seed=CLEAN_SEED, out_dir=out, profile="clean")
    return manifest_path, records, out


def test_hsv_oracle_equivalence():
    """10,000 random RGB triples within +/-1 per channel of the
    double-precision reference; value channel exact; under 1 second."""
    rng = np.random.default_rng(20_000)
    triples = rng.integers(0, 256, size=(10_000, 3))
    start = time.perf_counter()
    for r, g, b in triples:
        got = rgb_to_hsv(Rgb8(int(r), int(g), int(b)))
        h_ref, s_ref, v_ref = oracle_hsv(int(r), int(g), int(b))
        assert got.v == v_ref, "value must match max(R,G,B) exactly"
        assert abs(got.s - s_ref) <= 1.0
        assert hue_distance(got.h, h_ref) <= 1.0
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"HSV oracle sweep took {elapsed:.2f}s (budget 1s)"
    print(f"\nACCEPTANCE hsv-oracle-equivalence: PASS ({elapsed:.2f}s)")


def test_component_labeling_oracle():
    """50 random 64x64 masks: rectangles and pixel counts equal the
    brute-force flood-fill reference exactly; under 5 seconds."""
    rng = np.random.default_rng(30_000)
    start = time.perf_counter()
    for i in range(50):
        mask = rng.random((64, 64)) < rng.uniform(0.05, 0.6)
        got = Counter(as_tuples(connected_components(mask)))
        ref = Counter(flood_fill_rects(mask))
        assert got == ref, f"component mismatch on mask {i}"
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"labeling sweep took {elapsed:.2f}s (budget 5s)"
    print(f"\nACCEPTANCE component-labeling-oracle: PASS ({elapsed:.2f}s)")


def test_gaussian_kernel_values():
    """3x3 sigma=1 weights match the hand-derived normalized surface within
    1e-6; every kernel sums to 1 within 1e-9."""
    k = make_gaussian_kernel(3, 1.0)
    e_edge = math.exp(-0.5)
    e_corner = math.exp(-1.0)
    norm = 1.0 + 4 * e_edge + 4 * e_corner
    assert abs(k.weights[1, 1] - 1.0 / norm) < 1e-6
    assert abs(k.weights[0, 1] - e_edge / norm) < 1e-6
    assert abs(k.weights[0, 0] - e_corner / norm) < 1e-6
    for size, sigma in [(3, 1.0), (5, 1.1), (7, 0.6), (9, 3.0), (15, 2.2)]:
        kk = make_gaussian_kernel(size, sigma)
        assert abs(kk.weights.sum() - 1.0) <= 1e-9
    print("\nACCEPTANCE gaussian-kernel-values: PASS")


def test_mvd_grouping_oracle():
    """200 random center multisets match the gap-clustering reference
    partition exactly; a gap equal to the threshold starts a new band."""
    rng = np.random.default_rng(40_000)
    for _ in range(200):
        n = int(rng.integers(0, 14))
        ys = [float(v) for v in rng.integers(0, 150, size=n)]
        mvd = float(rng.integers(0, 45))
        got = [sorted(r.y_center for r in g.rects) for g in group_by_mvd([rect_at(y) for y in ys], mvd)]
        assert got == [sorted(g) for g in gap_cluster_oracle(ys, mvd)]
    assert len(group_by_mvd([rect_at(0), rect_at(24)], 24)) == 2
    assert len(group_by_mvd([rect_at(0), rect_at(24)], 25)) == 1
    print("\nACCEPTANCE mvd-grouping-oracle: PASS")


def test_clean_fixture_end_to_end(clean130):
    """All 130 clean fixtures decode to their exact codes with the shipped
    config, covering both anchors and wire-cut split bands; decode under 60s."""
    manifest_path, records, out = clean130
    manifest = load_manifest(manifest_path)
    config = default_config()

    anchors = {r.anchor for r in records}
    assert anchors == {"top", "bottom"}, "dataset must cover both anchors"

    start = time.perf_counter()
    train_eval = evaluate_full(config, manifest, "train")
    val_eval = evaluate_full(config, manifest, "validation")
    elapsed = time.perf_counter() - start
    hits = train_eval.exact_matches + val_eval.exact_matches
    total = len(train_eval.images) + len(val_eval.images)
    assert total == 130
    faults = [
        (o.expected, o.produced)
        for ev in (train_eval, val_eval)
        for o in ev.images
        if not o.hit
    ]
    assert hits == 130, f"clean decode must be exact on all fixtures; faults: {faults}"
    assert elapsed < 60.0, f"decode phase took {elapsed:.1f}s (budget 60s)"

    # At least one fixture must exercise the split-band merge path.
    split_seen = False
    for rec in records[:40]:
        result = decode_image(load_image(out / rec.path), config=config)
        if any(len(b.member_rects) > 1 for b in result.bands):
            split_seen = True
            break
    assert split_seen, "expected at least one band split by a wire-cut gap"
    print(f"\nACCEPTANCE clean-fixture-end-to-end: PASS (130/130 in {elapsed:.1f}s)")


def test_flip_symmetry(clean130):
    """Vertically mirroring a fixture reverses the decoded string exactly
    when the reading direction is held fixed; with automatic anchoring the
    code is invariant (the anchor side flips with the image)."""
    manifest_path, records, out = clean130
    config = default_config()
    for i, rec in enumerate(records):
        img = load_image(out / rec.path)
        flipped = img[::-1].copy()
        pinned = decode_image(img, config=config, anchor="top").code
        pinned_flipped = decode_image(flipped, config=config, anchor="top").code
        assert pinned_flipped == pinned[::-1], f"{rec.path}: pinned flip must reverse"
        if i < 20:
            assert decode_image(img, config=config).code == rec.code
            assert decode_image(flipped, config=config).code == rec.code
    print("\nACCEPTANCE flip-symmetry: PASS")


def test_noisy_training_analogue(tmp_path):
    """109/21 noisy split (fade 0.35, brightness +/-40, hue jitter +/-4,
    gap probability 0.5): after grid-search training the validation
    exact-match rate reaches at least 0.75; everything within 15 minutes."""
    start = time.perf_counter()
    data_dir = tmp_path / "noisy130"
    manifest_path, _ = generate_dataset(130, 109 / 130, seed=NOISY_SEED, out_dir=data_dir, profile="noisy")

    trained_path = tmp_path / "trained.json"
    code = cli_main([
        "train", str(manifest_path), "--out", str(trained_path), "--jobs", "4",
    ])
    assert code == 0

    trained = load_config(trained_path)
    manifest = load_manifest(manifest_path)
    train_eval = evaluate_full(trained, manifest, "train")
    val_eval = evaluate_full(trained, manifest, "validation")
    elapsed = time.perf_counter() - start

    assert len(train_eval.images) == 109
    assert len(val_eval.images) == 21
    assert val_eval.rate >= 0.75, (
        f"validation exact-match {val_eval.rate:.2%} below the 75% floor; "
        f"train {train_eval.rate:.2%}"
    )
    assert elapsed < 900.0, f"noisy train+validate took {elapsed:.0f}s (budget 900s)"
    print(
        f"\nACCEPTANCE noisy-training-analogue: PASS "
        f"(validation {val_eval.rate:.2%}, train {train_eval.rate:.2%}, {elapsed:.0f}s)"
    )


def test_determinism_of_train_and_validate(tmp_path):
    """Two full train+validate runs with identical seeds produce
    byte-identical configs and reports."""
    data_dir = tmp_path / "noisy16"
    manifest_path, _ = generate_dataset(16, 0.75, seed=DETERMINISM_SEED, out_dir=data_dir, profile="noisy")

    outputs = []
    for run in ("one", "two"):
        cfg_path = tmp_path / f"trained_{run}.json"
        report_path = tmp_path / f"report_{run}.json"
        assert cli_main([
            "train", str(manifest_path), "--out", str(cfg_path), "--jobs", "2",
        ]) == 0
        assert cli_main([
            "validate", str(manifest_path), "--config", str(cfg_path),
            "--split", "validation", "--report-out", str(report_path),
        ]) == 0
        outputs.append((cfg_path.read_bytes(), report_path.read_bytes()))

    assert outputs[0][0] == outputs[1][0], "trained configs must be byte-identical"
    assert outputs[0][1] == outputs[1][1], "validation reports must be byte-identical"
    print("\nACCEPTANCE determinism: PASS")
