"""
Tests for the verification report: recording, suites and export.
"""
import json
import sys
from pathlib import Path

import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.config import RunConfig
from src.series import TruncSeries
from src.validation import FAIL, PASS, REPORT, REPORT_NOTE, SKIPPED, MissingDataError, VerificationReport


@pytest.fixture
def report():
    return VerificationReport(RunConfig(command="verify", suite="pf", geometry="twisted-p3", order=3))


# ---------------------------------------------------------------------------
# Tests — Recording
# ---------------------------------------------------------------------------

class TestRecording:
    def test_zero_residual_passes(self, report):
        entry = report.record("zero", TruncSeries.zero(("q",), (3,)))
        assert entry == {"status": PASS}

    def test_failing_residual_described(self, report):
        entry = report.record("bad", TruncSeries.from_list([0, 0, 3], "q"))
        assert entry["status"] == FAIL
        assert entry["first_nonzero"] == "3/1 * q^2"
        assert not report.passed

    def test_skipped_does_not_fail(self, report):
        report.record("fit", status=SKIPPED, detail="insufficient order")
        report.record("ok", passed=True)
        assert report.passed

    def test_report_entries_do_not_pass_or_fail(self, report):
        report.record("lift", TruncSeries.from_list([0, 1], "q"), status=REPORT)
        assert report.passed
        assert report.generate_full_report()["summary"]["counts"] == {REPORT: 1}

    def test_record_all_zero(self, report):
        residuals = {
            "a": TruncSeries.zero(("q",), (2,)),
            "b": TruncSeries.from_list([0, 1], "q"),
        }
        entry = report.record_all_zero("family", residuals)
        assert entry["status"] == FAIL
        assert entry["failing"] == ["b"]


# ---------------------------------------------------------------------------
# Tests — Suites
# ---------------------------------------------------------------------------

class TestSuites:
    def test_pf_suite(self, report):
        report.run("pf")
        assert report.passed
        assert "pf" in report.timings
        assert "pf" in report.provenance

    def test_birkhoff_suite(self):
        report = VerificationReport(RunConfig(command="verify", suite="birkhoff", order=3))
        report.run("birkhoff")
        assert report.results["C1 = C3"]["status"] == PASS
        assert report.results["C4 = 1"]["status"] == PASS
        assert report.passed

    def test_unknown_suite(self, report):
        with pytest.raises(ValueError):
            report.run("genus3")

    def test_anomaly_needs_table(self, tmp_path):
        config = RunConfig(command="verify", suite="anomaly", hodge_table=str(tmp_path / "absent.csv"))
        with pytest.raises(MissingDataError):
            VerificationReport(config).run("anomaly")


# ---------------------------------------------------------------------------
# Tests — Output
# ---------------------------------------------------------------------------

class TestOutput:
    def test_full_report(self, report):
        report.record("ok", passed=True)
        report.record("fit", status=SKIPPED)
        full = report.generate_full_report()
        assert full["summary"] == {"passed": True, "counts": {PASS: 1, SKIPPED: 1}, "note": REPORT_NOTE}
        assert full["command"]["suite"] == "pf"
        assert "generated_at" not in full

    def test_export_report(self, report, tmp_path):
        report.record("ok", passed=True)
        path = Path(report.export_report(str(tmp_path / "verify_pf.json")))
        data = json.loads(path.read_text())
        assert data["checks"]["ok"]["status"] == PASS
        meta = json.loads((tmp_path / "verify_pf_metadata.json").read_text())
        assert "generated_at" in meta
