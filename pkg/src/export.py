"""
Series Export Module
Writes named q-series as exact coefficient tables for downstream consumers
"""
import json
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from src.scalars import Cyclotomic, scalar_to_str
from src.series import TruncSeries


def coefficient_strings(series: TruncSeries) -> List:
    """
    Coefficients as exact strings, "p/q" for rationals and a list of
    coordinate strings for cyclotomic values.
    """
    out = []
    for c in series.coefficients():
        if isinstance(c, Cyclotomic) and not c.is_rational():
            out.append([scalar_to_str(x) for x in c.coeffs])
        else:
            out.append(scalar_to_str(c))
    return out


def series_frame(series: Dict[str, TruncSeries]) -> pd.DataFrame:
    """One row per q-exponent, one column per series."""
    order = max((s.orders[0] for s in series.values()), default=-1)
    rows = {"q": list(range(order + 1))}
    for name, s in series.items():
        values = [scalar_to_str(c) for c in s.coefficients()]
        rows[name] = values + [""] * (order + 1 - len(values))
    return pd.DataFrame(rows)


def render_text(series: Dict[str, TruncSeries]) -> str:
    width = max((len(name) for name in series), default=0)
    return "\n".join(f"{name:<{width}} : {', '.join(map(str, coefficient_strings(s)))}" for name, s in series.items())


class SeriesExporter:
    """Export coefficient tables in JSON, CSV and plain-text form"""

    def __init__(self, output_dir: str = "output"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def export_json(self, series: Dict[str, TruncSeries], filename: str = "series.json") -> str:
        """
        Export {name: [coefficient strings]}

        Args:
            series: named q-series, in output order
            filename: Output filename

        Returns:
            Path to exported file
        """
        output_path = self.output_dir / filename
        payload = {name: coefficient_strings(s) for name, s in series.items()}
        with open(output_path, "w") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        print(f"Exported series JSON: {output_path}")
        return str(output_path)

    def export_csv(self, series: Dict[str, TruncSeries], filename: str = "series.csv") -> str:
        output_path = self.output_dir / filename
        series_frame(series).to_csv(output_path, index=False)
        print(f"Exported series CSV: {output_path}")
        return str(output_path)

    def export_text(self, series: Dict[str, TruncSeries], filename: str = "series.txt") -> str:
        output_path = self.output_dir / filename
        with open(output_path, "w") as f:
            f.write(render_text(series) + "\n")
        print(f"Exported series text: {output_path}")
        return str(output_path)

    def export_metadata(self, config: Dict, filename: str = "series_metadata.json") -> str:
        """Run metadata, kept apart so the series files stay byte-stable"""
        output_path = self.output_dir / filename
        meta = {
            "generated_at": datetime.now().isoformat(),
            "config": config,
        }
        with open(output_path, "w") as f:
            json.dump(meta, f, indent=2, default=str)
        return str(output_path)

    def export_all(self, series: Dict[str, TruncSeries], output_format: str = "json", config: Optional[Dict] = None) -> Dict[str, str]:
        """
        Export in the requested format (csv also writes json) plus metadata

        Returns:
            Dict mapping format name to file path
        """
        exports = {}
        if output_format in ("json", "csv"):
            exports["json"] = self.export_json(series)
        if output_format == "csv":
            exports["csv"] = self.export_csv(series)
        if output_format == "text":
            exports["text"] = self.export_text(series)
        exports["metadata"] = self.export_metadata(config or {})
        print(f"\nAll exports complete. Files in: {self.output_dir}")
        return exports
