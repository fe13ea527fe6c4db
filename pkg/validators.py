"""Validators for newform records, character specs and job configs."""
from typing import Any, Dict, List, Optional

from sympy import factorint, isprime

from forms.newform_data import ClassicalNewformData, ramanujan_violations
from quadfield import SUPPORTED_D


class ValidationResult:
    """Result of validation check."""

    def __init__(self, is_valid: bool, errors: Optional[List[str]] = None, warnings: Optional[List[str]] = None):
        """
        Initialize validation result.

        Args:
            is_valid: Whether validation passed
            errors: Optional list of error messages
            warnings: Optional list of warning messages
        """
        self.is_valid = is_valid
        self.errors = errors if errors is not None else []
        self.warnings = warnings if warnings is not None else []

    def __bool__(self):
        """Return validation status."""
        return self.is_valid

    def merge(self, other: "ValidationResult") -> "ValidationResult":
        return ValidationResult(
            self.is_valid and other.is_valid,
            self.errors + other.errors,
            self.warnings + other.warnings,
        )


def validate_newform(data: ClassicalNewformData, bound: Optional[int] = None) -> ValidationResult:
    """
    Sanity checks on ingested newform data.

    Errors: non-prime keys, Ramanujan-bound violations (one per prime), Atkin-Lehner
    signs at primes not dividing the level. Warnings: no root-number data.
    """
    errors: List[str] = []
    warnings: List[str] = []

    if data.level < 1:
        errors.append(f"level {data.level} must be positive")
    if data.weight < 2 or data.weight % 2:
        errors.append(f"weight {data.weight} must be even and at least 2")

    for ell in sorted(data.coefficients):
        if not isprime(ell):
            errors.append(f"a_{ell}: coefficients are keyed by primes")
    for ell in ramanujan_violations(data):
        errors.append(f"a_{ell} = {data.coefficients[ell]} violates |a_ell| <= 2 ell^((k+1)/2)")

    level_primes = set(factorint(data.level)) if data.level > 0 else set()
    for ell, sign in sorted(data.atkin_lehner.items()):
        if ell not in level_primes:
            errors.append(f"Atkin-Lehner sign given at {ell}, which does not divide {data.level}")
        if sign not in (1, -1):
            errors.append(f"Atkin-Lehner sign at {ell} must be +1 or -1, got {sign}")

    if bound is not None:
        missing = data.missing_primes(bound)
        if missing:
            errors.append(f"a_{missing[0]} missing (coefficients requested up to {bound})")

    if not errors and not data.has_atkin_lehner():
        warnings.append(f"{data.label}: no Atkin-Lehner data; root number and classical Fricke sign unavailable")

    return ValidationResult(len(errors) == 0, errors, warnings)


CHARACTER_KEYS = {"label", "conductor", "type", "finite_part", "values", "all"}


def validate_character_spec(entry: Dict[str, Any]) -> ValidationResult:
    """Shape checks for one entry of a character file."""
    errors: List[str] = []
    warnings: List[str] = []

    unknown = set(entry) - CHARACTER_KEYS
    if unknown:
        errors.append(f"unknown keys {sorted(unknown)}")
    if "conductor" not in entry:
        errors.append("missing 'conductor'")
    inf_type = entry.get("type", [0, 0])
    if not (isinstance(inf_type, list) and len(inf_type) == 2 and all(isinstance(x, int) and x >= 0 for x in inf_type)):
        errors.append(f"'type' must be a pair of nonnegative integers, got {inf_type!r}")
    given = [key for key in ("finite_part", "values", "all") if key in entry]
    if len(given) > 1:
        errors.append(f"give only one of 'finite_part', 'values', 'all' (got {given})")
    if not given:
        warnings.append("no finite part given; using the trivial one")

    return ValidationResult(len(errors) == 0, errors, warnings)


JOB_KEYS = {
    "field", "newform", "characters", "prec", "split_point", "fricke_sign", "prime", "stabilise",
    "out", "cache_dir", "tolerance", "workers", "bound", "flip_sign",
}


def validate_job(job: Dict[str, Any]) -> ValidationResult:
    """Checks on a job config before any file it names is opened."""
    errors: List[str] = []
    warnings: List[str] = []

    unknown = set(job) - JOB_KEYS
    if unknown:
        errors.append(f"unknown job keys {sorted(unknown)}")
    d = job.get("field")
    if d is None:
        errors.append("missing 'field'")
    elif d not in SUPPORTED_D:
        errors.append(f"field d = {d} is not class number one; supported: {list(SUPPORTED_D)}")
    if "newform" not in job:
        errors.append("missing 'newform'")
    prec = job.get("prec")
    if prec is not None and (not isinstance(prec, int) or prec < 10):
        errors.append(f"'prec' must be an integer >= 10, got {prec!r}")
    sign = job.get("fricke_sign")
    if sign is not None and sign not in (1, -1, "+1", "-1", "classical", "estimate"):
        errors.append(f"'fricke_sign' must be +1, -1, 'classical' or 'estimate', got {sign!r}")
    prime = job.get("prime")
    if prime is not None and not (isinstance(prime, int) and isprime(prime)):
        errors.append(f"'prime' must be a rational prime, got {prime!r}")
    if job.get("stabilise") and prime is None:
        errors.append("'stabilise' needs 'prime'")
    if prec is not None and isinstance(prec, int) and prec > 200:
        warnings.append(f"precision {prec} is very high; expect long runtimes")

    return ValidationResult(len(errors) == 0, errors, warnings)
