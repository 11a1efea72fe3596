#!/usr/bin/env python3
"""
Quasimap Series Engine
======================

Command-line driver that:
1. Computes the named base series of a geometry (series)
2. Runs a verification suite against the closed-form identities (verify)
3. Writes exact coefficient tables to disk (export)

Usage:
    python main.py series --geometry local-p1p1 --order 3
    python main.py series --geometry hypersurface --m 2 --n 3 --order 2 --format csv
    python main.py verify pf --geometry twisted-p3 --order 8
    python main.py verify genus1 --m 2 --n 4 --order 6
    python main.py verify anomaly --order 3 --hodge-table data/hodge_table.csv
    python main.py export --geometry local-p1p1 --order 2 --format csv --out output

Exit codes: 0 pass, 1 verification failure, 2 usage, 3 missing data, 4 I/O.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.config import FORMATS, SUITES, ConfigError, RunConfig, parse_regulator
from src.correlators import MissingHodgeIntegralError
from src.export import SeriesExporter, coefficient_strings, render_text, series_frame
from src.geometry import GEOMETRIES, HYPERSURFACE, Geometry, base_series
from src.series import RegulatorError, SeriesError
from src.validation import MissingDataError, VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MISSING, EXIT_IO = 0, 1, 2, 3, 4


def geometry_for(config: RunConfig) -> Geometry:
    if config.geometry == HYPERSURFACE:
        return Geometry.hypersurface(config.m, config.n)
    return Geometry.from_dict({"geometry": config.geometry})


def compute_series(config: RunConfig):
    return base_series(geometry_for(config), config.effective_order)


def run_series(config: RunConfig) -> int:
    """Print the named base series in the chosen format"""
    series = compute_series(config)
    if config.output_format == "json":
        payload = {name: coefficient_strings(s) for name, s in series.items()}
        print(json.dumps(payload, indent=2))
    elif config.output_format == "csv":
        print(series_frame(series).to_csv(index=False), end="")
    else:
        print(render_text(series))
    return EXIT_OK


def run_verify(config: RunConfig) -> int:
    """
    Run one verification suite and export its report

    Returns:
        0 if every non-skipped check passed, 1 otherwise
    """
    print("=" * 60)
    print(f"VERIFY {config.suite.upper()} (order {config.effective_order})")
    print("=" * 60)

    print("\n[1/2] RUNNING CHECKS...")
    print("-" * 40)
    report = VerificationReport(config).run(config.suite)
    for name, entry in report.results.items():
        line = f"  {entry['status'].upper():<8} {name}"
        if "first_nonzero" in entry:
            line += f"  (first nonzero: {entry['first_nonzero']})"
        print(line)

    print("\n[2/2] EXPORTING REPORT...")
    print("-" * 40)
    report.export_report(str(Path(config.output_dir) / f"verify_{config.suite}.json"))

    summary = report.generate_full_report()["summary"]
    print("\n" + "=" * 60)
    print("VERIFICATION PASSED" if summary["passed"] else "VERIFICATION FAILED")
    print("=" * 60)
    for status, count in sorted(summary["counts"].items()):
        print(f"  {status}: {count}")
    print(f"  ({summary['note']})")
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def run_export(config: RunConfig) -> int:
    print("\n[1/1] EXPORTING SERIES...")
    print("-" * 40)
    exporter = SeriesExporter(config.output_dir)
    exporter.export_all(compute_series(config), config.output_format, config.echo())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Quasimap series engine: base series, verification suites and exports"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--geometry", choices=GEOMETRIES, default=None,
        help="Geometry (default: local-p1p1)"
    )
    common.add_argument(
        "--geometry-file", type=str, default=None,
        help="JSON geometry descriptor {geometry, m, n, order}"
    )
    common.add_argument("--m", type=int, default=None, help="Hypersurface m (default: 2)")
    common.add_argument("--n", type=int, default=None, help="Hypersurface n (default: 2)")
    common.add_argument(
        "--order", type=int, default=None,
        help="q truncation order (default: 8, anomaly suite 3)"
    )
    common.add_argument("--z-depth", type=int, default=None, help="z truncation depth (default: 6)")
    common.add_argument(
        "--regulator", type=str, default=None,
        help="Comma-separated regulator rationals, e.g. 1,2,3"
    )
    common.add_argument("--format", choices=FORMATS, default=None, dest="output_format", help="Output format (default: json)")
    common.add_argument("--hodge-table", type=str, default=None, help="Hodge integral table file")
    common.add_argument("--out", type=str, default=None, dest="output_dir", help="Output directory (default: output)")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("series", parents=[common], help="Print base series coefficients")
    verify = sub.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("suite", choices=SUITES)
    sub.add_parser("export", parents=[common], help="Write coefficient tables")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "command": args.command,
        "geometry": args.geometry,
        "m": args.m,
        "n": args.n,
        "order": args.order,
        "z_depth": args.z_depth,
        "output_format": args.output_format,
        "hodge_table": args.hodge_table,
        "output_dir": args.output_dir,
        "suite": getattr(args, "suite", None),
        "verbose": args.verbose,
    }
    if args.geometry_file:
        with open(args.geometry_file) as f:
            doc = json.load(f)
        for key in ("geometry", "m", "n", "order"):
            if overrides[key] is None and key in doc:
                overrides[key] = doc[key]
    if args.regulator is not None:
        overrides["regulator"] = parse_regulator(args.regulator)
    return RunConfig.from_env(**overrides).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        config = config_from_args(args)
    except (ConfigError, RegulatorError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cannot read geometry file: {exc}", file=sys.stderr)
        return EXIT_MISSING

    runners = {"series": run_series, "verify": run_verify, "export": run_export}
    try:
        return runners[config.command](config)
    except (MissingDataError, MissingHodgeIntegralError, FileNotFoundError) as exc:
        print(f"missing data: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SeriesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
