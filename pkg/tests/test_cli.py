"""CLI tests through click's CliRunner: exit codes and JSON-lines output."""
import json
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import config
from cli import cli


@pytest.fixture
def runner():
    return CliRunner()


def _records(path: Path):
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


# ──────────────────────────────────────────────────────────────────
# Basics
# ──────────────────────────────────────────────────────────────────

def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert config.VERSION in result.output


def test_help_lists_commands(runner):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for command in ("ingest", "lvalue", "check-fe", "stabilise", "check-padic-fe", "fricke-sign", "oracle", "slopes"):
        assert command in result.output


# ──────────────────────────────────────────────────────────────────
# ingest
# ──────────────────────────────────────────────────────────────────

def test_ingest_is_idempotent(runner, tmp_path):
    out = tmp_path / "ingest.jsonl"
    args = ["ingest", "11a", "--cache-dir", str(tmp_path / "cache"), "--out", str(out), "--field", "-1", "--warm-norm", "20"]
    assert runner.invoke(cli, args).exit_code == 0
    assert runner.invoke(cli, args).exit_code == 0
    first, second = _records(out)
    assert first["stored"] is True and second["stored"] is False
    assert first["warmed"] > 0
    assert first["config"]["files"] == ["11a"]


def test_ingest_rejects_invalid_newform(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"label": "bad", "level": 11, "weight": 2, "coefficients": [[2, 9], [3, -1]]}))
    result = runner.invoke(cli, ["ingest", str(bad), "--cache-dir", str(tmp_path / "cache"), "--out", str(tmp_path / "r.jsonl")])
    assert result.exit_code == 2
    (record,) = _records(tmp_path / "r.jsonl")
    assert record["error"]["code"] == "INVALID_NEWFORM"


# ──────────────────────────────────────────────────────────────────
# Job commands
# ──────────────────────────────────────────────────────────────────

def test_lvalue_writes_one_record_per_character(runner, tmp_path):
    out = tmp_path / "lvalues.jsonl"
    result = runner.invoke(cli, [
        "lvalue", "--field", "-1", "--newform", "11a", "--chars", "qi_trivial", "--chars", "qi_mod3",
        "--fricke-sign", "classical", "--prec", "20", "--out", str(out), "--cache-dir", str(tmp_path / "cache"),
    ])
    assert result.exit_code == 0, result.output
    records = _records(out)
    assert [r["character"] for r in records] == ["trivial", "mod3.0"]
    assert all(r["kind"] == "lvalue" and r["precision"] == 20 for r in records)
    assert records[0]["config"]["newform"] == "11a"


def test_check_fe_acceptance_job_passes(runner, tmp_path):
    out = tmp_path / "fe.jsonl"
    result = runner.invoke(cli, ["check-fe", "--config", "acceptance_qi_11a", "--prec", "20", "--out", str(out),
                                 "--cache-dir", str(tmp_path / "cache")])
    assert result.exit_code == 0, result.output
    assert {r["verdict"] for r in _records(out)} == {"pass"}


def test_flipped_sign_job_exits_3(runner, tmp_path):
    out = tmp_path / "fe.jsonl"
    result = runner.invoke(cli, ["check-fe", "--config", "flipped_sign", "--prec", "20", "--out", str(out),
                                 "--cache-dir", str(tmp_path / "cache")])
    assert result.exit_code == 3
    (record,) = _records(out)
    assert record["verdict"] == "fail" and record["flipped_sign"] is True


def test_wild_conductor_job_exits_4(runner, tmp_path):
    out = tmp_path / "padic.jsonl"
    result = runner.invoke(cli, ["check-padic-fe", "--config", "wild_conductor", "--out", str(out),
                                 "--cache-dir", str(tmp_path / "cache")])
    assert result.exit_code == 4
    records = _records(out)
    assert records and all(r["error"]["code"] == "WILD_CONDUCTOR_UNSUPPORTED" for r in records)


def test_unsupported_field_exits_2(runner, tmp_path):
    result = runner.invoke(cli, ["lvalue", "--field", "-5", "--newform", "11a", "--out", str(tmp_path / "r.jsonl")])
    assert result.exit_code == 2
    assert "CONFIG_ERROR" in result.output


def test_padic_job_needs_prime(runner, tmp_path):
    result = runner.invoke(cli, ["check-padic-fe", "--field", "-1", "--newform", "11a", "--fricke-sign", "classical",
                                 "--out", str(tmp_path / "r.jsonl"), "--cache-dir", str(tmp_path / "cache")])
    assert result.exit_code == 2


def test_slopes(runner, tmp_path):
    out = tmp_path / "slopes.jsonl"
    result = runner.invoke(cli, ["slopes", "--field", "-1", "--newform", "11a", "--prime", "3", "--fricke-sign", "classical",
                                 "--out", str(out), "--cache-dir", str(tmp_path / "cache")])
    assert result.exit_code == 0, result.output
    (record,) = _records(out)
    assert record["class"] == "small"
    assert record["primes"][0]["lambda"] == -5


def test_oracle_command(runner, tmp_path):
    out = tmp_path / "oracle.jsonl"
    result = runner.invoke(cli, ["oracle", "--field", "-1", "--newform", "11a", "--fricke-sign", "classical",
                                 "--prec", "20", "--out", str(out), "--cache-dir", str(tmp_path / "cache")])
    assert result.exit_code == 0, result.output
    (record,) = _records(out)
    assert record["kind"] == "fe-oracle" and record["verdict"] == "pass"


if __name__ == "__main__":
    r = CliRunner()
    test_version(r)
    test_help_lists_commands(r)
    print("✓ CLI basics")
