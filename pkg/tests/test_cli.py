"""
Tests for the command-line driver and the series exporter.
"""
import json
import sys
from pathlib import Path

import pandas as pd
import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

from generate_hodge_table import main as generate_hodge_table
from main import EXIT_MISSING, EXIT_OK, EXIT_USAGE, main
from src.config import ENV_HODGE_TABLE, ENV_ORDER, ENV_OUTPUT_DIR, ENV_Z_DEPTH
from src.export import SeriesExporter, coefficient_strings, render_text, series_frame
from src.scalars import Cyclotomic
from src.series import TruncSeries


@pytest.fixture(autouse=True)
def isolated(monkeypatch, tmp_path):
    for name in (ENV_ORDER, ENV_Z_DEPTH, ENV_HODGE_TABLE, ENV_OUTPUT_DIR):
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
    monkeypatch.chdir(tmp_path)


def run_json(capsys, argv):
    assert main(argv) == EXIT_OK
    return json.loads(capsys.readouterr().out)


# ---------------------------------------------------------------------------
# Tests — Export helpers
# ---------------------------------------------------------------------------

class TestExportHelpers:
    def test_coefficient_strings(self):
        s = TruncSeries.from_list([1, Cyclotomic.root(4), Cyclotomic.rational(4, 2)], "q")
        assert coefficient_strings(s) == ["1/1", ["0/1", "1/1"], "2/1"]

    def test_series_frame_pads_short_series(self):
        frame = series_frame({
            "a": TruncSeries.from_list([1, 2, 3], "q"),
            "b": TruncSeries.from_list([5], "q"),
        })
        assert list(frame.columns) == ["q", "a", "b"]
        assert list(frame["b"]) == ["5/1", "", ""]

    def test_render_text(self):
        text = render_text({"L": TruncSeries.from_list([1, 4], "q")})
        assert text == "L : 1/1, 4/1"

    def test_export_all_csv(self, tmp_path):
        exporter = SeriesExporter(str(tmp_path / "out"))
        paths = exporter.export_all({"L": TruncSeries.from_list([1, 4], "q")}, "csv", {"order": 1})
        assert set(paths) == {"json", "csv", "metadata"}
        assert json.loads(Path(paths["json"]).read_text()) == {"L": ["1/1", "4/1"]}


# ---------------------------------------------------------------------------
# Tests — series
# ---------------------------------------------------------------------------

class TestSeriesCommand:
    def test_local_p1p1(self, capsys):
        out = run_json(capsys, ["series", "--geometry", "local-p1p1", "--order", "3"])
        assert out["L"] == ["1/1", "4/1", "40/1", "480/1"]
        assert out["C1"] == ["1/1", "4/1", "36/1", "400/1"]
        assert out["A2"][0] == "1/4"

    def test_hypersurface(self, capsys):
        out = run_json(capsys, ["series", "--geometry", "hypersurface", "--m", "2", "--n", "3", "--order", "2"])
        assert out["I0"] == ["1/1", "2/1", "6/1"]

    def test_geometry_file(self, capsys, tmp_path):
        path = tmp_path / "geom.json"
        path.write_text(json.dumps({"geometry": "hypersurface", "m": 2, "n": 2, "order": 2}))
        out = run_json(capsys, ["series", "--geometry-file", str(path)])
        assert len(out["I0"]) == 3

    def test_csv_output(self, capsys):
        assert main(["series", "--order", "2", "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("q,L")
        assert len(lines) == 4


# ---------------------------------------------------------------------------
# Tests — verify and export
# ---------------------------------------------------------------------------

class TestVerifyCommand:
    def test_pf_passes(self, tmp_path):
        assert main(["verify", "pf", "--geometry", "twisted-p3", "--order", "4", "--out", str(tmp_path)]) == EXIT_OK
        report = json.loads((tmp_path / "verify_pf.json").read_text())
        assert report["summary"]["passed"] is True

    def test_anomaly_without_table(self, tmp_path):
        argv = ["verify", "anomaly", "--hodge-table", str(tmp_path / "absent.csv")]
        assert main(argv) == EXIT_MISSING

    def test_anomaly_with_generated_table(self, tmp_path):
        table_path = tmp_path / "data" / "hodge_table.csv"
        assert generate_hodge_table(["--out", str(table_path)]) == 0
        argv = ["verify", "anomaly", "--order", "3", "--hodge-table", str(table_path), "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        report = json.loads((tmp_path / "verify_anomaly.json").read_text())
        assert report["checks"]["genus-2 anomaly"]["status"] == "pass"
        assert report["checks"]["divisor equation F12 = D F11 / C1"]["status"] == "pass"
        assert report["summary"]["passed"] is True

    def test_anomaly_with_narrow_table(self, tmp_path):
        table_path = tmp_path / "narrow.csv"
        generate_hodge_table(["--out", str(table_path), "--max-markings", "6"])
        argv = ["verify", "anomaly", "--order", "2", "--hodge-table", str(table_path), "--out", str(tmp_path)]
        assert main(argv) == EXIT_MISSING


class TestExportCommand:
    def test_csv_export(self, tmp_path):
        out = tmp_path / "tables"
        assert main(["export", "--order", "2", "--format", "csv", "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out / "series.csv", dtype=str)
        assert len(frame) == 3
        assert (out / "series.json").exists()
        assert (out / "series_metadata.json").exists()

    def test_byte_stable(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        main(["export", "--order", "3", "--out", str(first)])
        main(["export", "--order", "3", "--out", str(second)])
        assert (first / "series.json").read_bytes() == (second / "series.json").read_bytes()


# ---------------------------------------------------------------------------
# Tests — Exit codes
# ---------------------------------------------------------------------------

class TestExitCodes:
    def test_negative_order(self):
        assert main(["series", "--order", "-1"]) == EXIT_USAGE

    def test_repeated_regulator(self):
        argv = ["verify", "genus1", "--geometry", "hypersurface", "--regulator", "1,1"]
        assert main(argv) == EXIT_USAGE

    def test_missing_geometry_file(self, tmp_path):
        assert main(["series", "--geometry-file", str(tmp_path / "absent.json")]) == EXIT_MISSING

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["plot"])
        assert exc.value.code == 2
