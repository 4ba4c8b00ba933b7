"""Command-line entry points: build caches, serve the API, print reports.

Exit codes: 0 ok, 1 data error, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .access import report_json
from .config import load_config
from .errors import ConfigError, DataError
from .pipeline import build_all, build_city_bundle, load_or_build_bundle, write_cache


def cmd_build(args: argparse.Namespace) -> int:
    run_cfg = load_config(args.config)
    for city_cfg in run_cfg.cities:
        bundle = build_city_bundle(city_cfg, run_cfg)
        written = write_cache(bundle, run_cfg)
        print(f"{city_cfg.id}: wrote {len(written)} cache files to "
              f"{run_cfg.cache_dir / city_cfg.id}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    run_cfg = load_config(args.config)
    bundles = build_all(run_cfg, use_cache=True)
    app = create_app(bundles, static_dir=run_cfg.static_dir)
    port = args.port if args.port is not None else run_cfg.port
    uvicorn.run(app, host=run_cfg.host, port=port, log_level="info")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    run_cfg = load_config(args.config)
    city_cfg = next((c for c in run_cfg.cities if c.id == args.city), None)
    if city_cfg is None:
        raise ConfigError(f"city {args.city!r} is not configured")
    bundle = load_or_build_bundle(run_cfg, city_cfg, use_cache=True)
    key = (args.category, args.window, args.dimension)
    if key not in bundle.reports:
        raise DataError(
            f"no report for category={args.category} window={args.window} "
            f"dimension={args.dimension}"
        )
    print(json.dumps(report_json(bundle.reports[key]), indent=2, sort_keys=True))
    return 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    from .fixtures import write_gridville

    config = write_gridville(args.out, args.seed)
    print(f"wrote {config}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transit-access",
        description="Transit accessibility scoring, equity reports and scenario service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="run ingest->routing->access, write cache files")
    p_build.add_argument("--config", required=True)
    p_build.set_defaults(fn=cmd_build)

    p_serve = sub.add_parser("serve", help="serve the HTTP API (and UI assets if configured)")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.set_defaults(fn=cmd_serve)

    p_report = sub.add_parser("report", help="print one equity report as JSON")
    p_report.add_argument("--config", required=True)
    p_report.add_argument("--city", required=True)
    p_report.add_argument("--category", required=True)
    p_report.add_argument("--window", required=True)
    p_report.add_argument("--dimension", required=True)
    p_report.set_defaults(fn=cmd_report)

    p_fixtures = sub.add_parser("fixtures", help="generate the Gridville fixture city")
    p_fixtures.add_argument("--out", required=True)
    p_fixtures.add_argument("--seed", type=int, default=7)
    p_fixtures.set_defaults(fn=cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
