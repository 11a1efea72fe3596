#!/usr/bin/env python3
"""
Generate the Hodge integral table used by the anomaly suite.

The table is not checked in; run this once before `verify anomaly`.
The default marking count covers every integral the anomaly suite reads.

Usage:
    python scripts/generate_hodge_table.py                      # data/hodge_table.csv
    python scripts/generate_hodge_table.py --out table.csv --max-markings 5
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.correlators import HodgeIntegralTable
from src.intersection import MAX_GENUS
from src.validation import TABLE_MARKINGS


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Write psi / lambda intersection numbers for genus <= 2")
    parser.add_argument("--out", type=str, default="data/hodge_table.csv", help="Output file (default: data/hodge_table.csv)")
    parser.add_argument("--max-genus", type=int, default=MAX_GENUS, help=f"Highest genus (default: {MAX_GENUS})")
    parser.add_argument(
        "--max-markings", type=int, default=TABLE_MARKINGS,
        help=f"Highest number of markings (default: {TABLE_MARKINGS}, enough for the anomaly suite)"
    )
    args = parser.parse_args(argv)

    table = HodgeIntegralTable.build_from_oracle(args.max_genus, args.max_markings)
    path = table.save(args.out)
    print(f"Exported {len(table)} Hodge integrals: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
