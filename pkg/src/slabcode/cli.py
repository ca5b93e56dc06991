"""Command-line front door: decode, train, validate, generate, serve.

Exit codes: 0 success, 1 error, 2 decode found no bands (operationally
distinct from a crash so factory scripts can branch on it).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import default_config, load_config, save_config
from .decoder import decode_image
from .errors import NoBandsError, SlabcodeError
from .imgio import load_image
from .raster import CropRect
from .synthgen import PROFILES, generate_dataset
from .trainer import (
    DEFAULT_EXHAUSTIVE_BUDGET,
    build_report,
    load_manifest,
    train_all,
)

log = logging.getLogger("slabcode")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_BANDS = 2


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except NoBandsError as exc:
        print(f"no bands detected: {exc}", file=sys.stderr)
        return EXIT_NO_BANDS
    except SlabcodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slabcode", description="Color-band code reader for granite slabs")
    parser.add_argument("--version", action="version", version=f"slabcode {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="decode one image to its numeric code")
    p.add_argument("image", type=Path)
    p.add_argument("--crop", type=_parse_crop, metavar="X,Y,W,H", help="crop in original image pixels")
    p.add_argument("--config", type=Path, help="detector config JSON (default: built-in)")
    p.add_argument("--anchor", choices=("auto", "top", "bottom"), help="override reading-direction policy")
    p.add_argument("--json-out", type=Path, help="write a machine-readable record here")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("train", help="grid-search detector parameters on a manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--config", type=Path, help="initial config (default: built-in)")
    p.add_argument("--grid", type=Path, help="JSON grid overrides keyed by row label")
    p.add_argument("--out", type=Path, required=True, help="where to write the trained config")
    p.add_argument("--split", default="train", choices=("train", "validation"))
    p.add_argument("--budget", type=int, default=DEFAULT_EXHAUSTIVE_BUDGET,
                   help="max grid size evaluated exhaustively")
    p.add_argument("--jobs", type=int, default=1, help="parallel evaluation workers")
    p.add_argument("--report-out", type=Path, help="write the post-training report JSON here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("validate", help="evaluate a config against a manifest split")
    p.add_argument("manifest", type=Path)
    p.add_argument("--config", type=Path, help="detector config (default: built-in)")
    p.add_argument("--split", default="validation", choices=("train", "validation"))
    p.add_argument("--report-out", type=Path, help="write the report JSON here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write synthetic labeled fixtures plus a manifest")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--profile", default="clean", choices=sorted(PROFILES))
    p.add_argument("--split-ratio", type=float, default=109 / 130)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="start the review HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--config", type=Path)
    p.add_argument("--corrections-file", type=Path)
    p.set_defaults(func=cmd_serve)

    return parser


def _parse_crop(text: str) -> CropRect:
    try:
        x, y, w, h = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"crop '{text}' must be X,Y,W,H integers") from None
    return CropRect(x, y, w, h)


def _load_config_arg(path: Path | None):
    return load_config(path) if path else default_config()


def cmd_decode(args) -> int:
    if not args.image.exists():
        print(f"error: {args.image}: no such file", file=sys.stderr)
        return EXIT_ERROR
    config = _load_config_arg(args.config)
    rgb = load_image(args.image)
    result = decode_image(rgb, crop_rect=args.crop, config=config, anchor=args.anchor)
    print(f"code={result.code} direction={result.direction.value}")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.json_out:
        record = {
            "path": str(args.image),
            "code": result.code,
            "direction": result.direction.value,
            "bands": [
                {
                    "color": b.color_name,
                    "digit": b.digit,
                    "y": round(b.y_center, 2),
                    "rect": {
                        "x_min": min(r.x_min for r in b.member_rects),
                        "x_max": max(r.x_max for r in b.member_rects),
                        "y_min": min(r.y_min for r in b.member_rects),
                        "y_max": max(r.y_max for r in b.member_rects),
                    },
                }
                for b in result.bands
            ],
            "warnings": sorted(result.warnings),
        }
        args.json_out.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_train(args) -> int:
    config = _load_config_arg(args.config)
    manifest = load_manifest(args.manifest)
    overrides = None
    if args.grid:
        overrides = json.loads(args.grid.read_text(encoding="utf-8"))
    trained, results = train_all(
        config, manifest, split=args.split, budget=args.budget, jobs=args.jobs,
        grid_overrides=overrides,
    )
    save_config(trained, args.out)
    print(f"wrote trained config to {args.out}")
    for row, res in zip(trained.rows, results):
        if res is None:
            print(f"  {row.label:<14} skipped (digit absent from split)")
        else:
            print(f"  {row.label:<14} rate {res.rate:.2%}  fp {res.fp_bands}  evals {res.evaluations}")
    if args.report_out:
        report = build_report(trained, manifest, args.split)
        _write_report(report, args.report_out)
    return EXIT_OK


def cmd_validate(args) -> int:
    config = _load_config_arg(args.config)
    manifest = load_manifest(args.manifest)
    report = build_report(config, manifest, args.split)
    print(report.to_text())
    if args.report_out:
        _write_report(report, args.report_out)
    return EXIT_OK


def _write_report(report, path: Path) -> None:
    path.write_text(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote report to {path}")


def cmd_generate(args) -> int:
    manifest_path, records = generate_dataset(
        args.n, args.split_ratio, args.seed, args.out_dir, profile=args.profile
    )
    print(f"wrote {len(records)} fixtures and {manifest_path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _load_config_arg(args.config)
    app = create_app(config=config, corrections_file=args.corrections_file)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
