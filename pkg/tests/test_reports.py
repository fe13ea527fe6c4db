"""Tests for report records and the JSON-lines writer."""
import io
import json
import sys
from pathlib import Path

import mpmath

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import config
from reports import ErrorReport, FEReport, LValueReport, ReportWriter, format_number, open_report_stream


def _lvalue(character="trivial", value=mpmath.mpc("0.5", "0")):
    return LValueReport(
        form="11a/K-1",
        character=character,
        value=value,
        split_point=mpmath.mpf("0.3"),
        fricke_sign_used=-1,
        certified_abs_error=mpmath.mpf("1e-30"),
        terms_used=120,
        precision=20,
    )


def test_format_number():
    assert format_number(None, 10) is None
    assert format_number(3, 10) == "3"
    assert format_number(mpmath.mpf("0.125"), 10) == "0.125"
    assert format_number(mpmath.mpc(1, -2), 5) == {"re": "1.0", "im": "-2.0"}


def test_writer_attaches_config_version_and_precision():
    stream = io.StringIO()
    writer = ReportWriter(stream, {"field_d": -1, "newform": "11a"}, 20)
    writer.write({"kind": "custom", "b": 1, "a": 2})
    line = stream.getvalue().strip()
    record = json.loads(line)
    assert record["config"] == {"field_d": -1, "newform": "11a"}
    assert record["version"] == config.VERSION
    assert record["precision"] == 20
    assert line == json.dumps(record, sort_keys=True)
    assert writer.count == 1


def test_one_line_per_report():
    stream = io.StringIO()
    ReportWriter(stream).write_all([_lvalue(), _lvalue("mod3"), ErrorReport("x", "E", "m", 2)])
    lines = stream.getvalue().splitlines()
    assert [json.loads(line)["kind"] for line in lines] == ["lvalue", "lvalue", "error"]


def test_lvalue_record():
    record = _lvalue().to_record()
    assert record["lambda"] == {"re": "0.5", "im": "0.0"}
    assert record["fricke_sign_used"] == -1
    assert record["path"] == "theorem"


def test_fe_report_verdict_and_extras():
    report = FEReport(_lvalue(), _lvalue("trivial*"), mpmath.mpc(-1), mpmath.mpf("2"), mpmath.mpf("1e-10"),
                      label="padic", extra={"p": 5, "period_cancels": True, "ratio": mpmath.mpf("0.5")})
    assert not report.passed and report.verdict == "fail"
    record = report.to_record()
    assert record["kind"] == "fe-padic"
    assert record["dual_character"] == "trivial*"
    assert record["p"] == 5 and record["period_cancels"] is True
    assert record["ratio"] == "0.5"


def test_error_report():
    record = ErrorReport("check-fe:11a/K-1:mod9.0", "WILD_CONDUCTOR_UNSUPPORTED", "wild", 4).to_record()
    assert record["error"] == {"code": "WILD_CONDUCTOR_UNSUPPORTED", "message": "wild", "exit_code": 4}


def test_report_stream_appends(tmp_path):
    assert open_report_stream(None) is sys.stdout
    assert open_report_stream("-") is sys.stdout
    path = tmp_path / "out" / "reports.jsonl"
    for _ in range(2):
        stream = open_report_stream(path)
        ReportWriter(stream).write({"kind": "x"})
        stream.close()
    assert len(path.read_text().splitlines()) == 2


if __name__ == "__main__":
    test_format_number()
    test_writer_attaches_config_version_and_precision()
    print("✓ Reports")
