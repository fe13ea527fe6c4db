"""Report records and the JSON-lines report writer.

Every record carries the job's config echo, the library version and the
working precision. Numbers are written as decimal strings at the report
precision so reruns produce identical bodies (apart from ``runtime_ms``).
"""
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, IO, Iterable, List, Optional, Union

import mpmath

import config

log = logging.getLogger(__name__)


def format_number(x, digits: int) -> Union[str, Dict[str, str], None]:
    """Decimal string for reals, {"re", "im"} for complex values."""
    if x is None:
        return None
    if isinstance(x, (int, str)):
        return str(x)
    if isinstance(x, mpmath.mpc) or isinstance(x, complex):
        x = mpmath.mpc(x)
        return {"re": mpmath.nstr(x.real, digits), "im": mpmath.nstr(x.imag, digits)}
    return mpmath.nstr(mpmath.mpf(x), digits)


@dataclass
class LValueReport:
    """One completed twisted L-value."""

    form: str
    character: str
    value: mpmath.mpc
    split_point: Optional[mpmath.mpf]
    fricke_sign_used: Optional[int]
    certified_abs_error: mpmath.mpf
    terms_used: int
    precision: int
    runtime_ms: int = 0
    path: str = "theorem"
    notes: List[str] = field(default_factory=list)
    # |upper branch| + |reflected branch| after the prefactor; the scale a vanishing value is judged against
    magnitude: Optional[mpmath.mpf] = None

    def to_record(self) -> Dict[str, Any]:
        return {
            "kind": "lvalue",
            "form": self.form,
            "character": self.character,
            "lambda": format_number(self.value, self.precision),
            "split_point": format_number(self.split_point, 20),
            "fricke_sign_used": self.fricke_sign_used,
            "certified_abs_error": format_number(self.certified_abs_error, 5),
            "terms_used": self.terms_used,
            "path": self.path,
            "notes": list(self.notes),
            "runtime_ms": self.runtime_ms,
        }


@dataclass
class FEReport:
    """Both sides of a functional equation and their relative residual."""

    lhs: LValueReport
    rhs: LValueReport
    epsilon_constant: mpmath.mpc
    residual: mpmath.mpf
    tolerance: mpmath.mpf
    lhs_factor: mpmath.mpc = mpmath.mpc(1)
    rhs_factor: mpmath.mpc = mpmath.mpc(1)
    absolute: bool = False
    label: str = "complex"
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_record(self) -> Dict[str, Any]:
        digits = self.lhs.precision
        record = {
            "kind": f"fe-{self.label}",
            "form": self.lhs.form,
            "character": self.lhs.character,
            "dual_character": self.rhs.character,
            "lhs": self.lhs.to_record(),
            "rhs": self.rhs.to_record(),
            "lhs_factor": format_number(self.lhs_factor, digits),
            "rhs_factor": format_number(self.rhs_factor, digits),
            "epsilon": format_number(self.epsilon_constant, digits),
            "residual": format_number(self.residual, 5),
            "tolerance": format_number(self.tolerance, 5),
            "absolute": self.absolute,
            "verdict": self.verdict,
        }
        for key, value in self.extra.items():
            record[key] = value if isinstance(value, (bool, int, str, list, dict, type(None))) else format_number(value, digits)
        return record


@dataclass
class ErrorReport:
    """A job that failed; written so batch output stays one record per job."""

    job: str
    error_code: str
    message: str
    exit_code: int

    def to_record(self) -> Dict[str, Any]:
        return {
            "kind": "error",
            "job": self.job,
            "error": {"code": self.error_code, "message": self.message, "exit_code": self.exit_code},
        }


class ReportWriter:
    """Writes one JSON object per line with the config echo attached."""

    def __init__(self, stream: IO[str], config_echo: Optional[Dict[str, Any]] = None, precision: Optional[int] = None):
        self.stream = stream
        self.config_echo = config_echo or {}
        self.precision = precision
        self.count = 0

    def write(self, report) -> Dict[str, Any]:
        record = report.to_record() if hasattr(report, "to_record") else dict(report)
        record["config"] = self.config_echo
        record["version"] = config.VERSION
        record["precision"] = self.precision
        self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        self.stream.flush()
        self.count += 1
        return record

    def write_all(self, reports: Iterable) -> List[Dict[str, Any]]:
        return [self.write(r) for r in reports]


def open_report_stream(path: Optional[Path]):
    """The output file (appended) or stdout when path is None or '-'."""
    if path is None or str(path) == "-":
        return sys.stdout
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "a", encoding="utf-8")


class Stopwatch:
    """Elapsed wall time in milliseconds."""

    def __init__(self):
        self.start = time.perf_counter()

    @property
    def ms(self) -> int:
        return int((time.perf_counter() - self.start) * 1000)
