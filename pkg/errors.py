"""Exception hierarchy shared by the library and the CLI.

Library code raises these; only ``cli.py`` turns them into exit codes.
"""
from typing import Optional


class BianchiError(Exception):
    """Base error carrying a stable machine-readable code."""

    exit_code = 1
    default_code = "ERROR"

    def __init__(self, message: str, error_code: Optional[str] = None):
        self.message = message
        self.error_code = error_code or self.default_code
        super().__init__(message)

    def render(self) -> str:
        """Format as the ERROR_CODE/ERROR_MESSAGE block the renderer parses."""
        return f"ERROR_CODE: {self.error_code}\nERROR_MESSAGE: {self.message}"


# ─── Input / configuration errors (exit code 2) ─────────────────────────────

class InputError(BianchiError):
    exit_code = 2
    default_code = "INPUT_ERROR"


class ConfigError(InputError):
    default_code = "CONFIG_ERROR"


class ParseError(InputError):
    default_code = "PARSE_ERROR"

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class MalformedSpec(InputError):
    default_code = "MALFORMED_SPEC"


class UnitIncompatible(InputError):
    default_code = "UNIT_INCOMPATIBLE"


class NotPrime(InputError):
    default_code = "NOT_PRIME"


class InsufficientCoefficients(InputError):
    default_code = "INSUFFICIENT_COEFFICIENTS"

    def __init__(self, message: str, prime: Optional[int] = None):
        self.prime = prime
        super().__init__(message)


class LevelNotCoprime(InputError):
    default_code = "LEVEL_NOT_COPRIME"


class ConductorNotCoprimeToLevel(InputError):
    default_code = "CONDUCTOR_NOT_COPRIME_TO_LEVEL"


class ConductorNotPPower(InputError):
    default_code = "CONDUCTOR_NOT_P_POWER"


class AlphaNotCoprime(InputError):
    default_code = "ALPHA_NOT_COPRIME"


class FrickeSignUnknown(InputError):
    default_code = "FRICKE_SIGN_UNKNOWN"


class MissingRootNumber(InputError):
    default_code = "MISSING_ROOT_NUMBER"


class NonUnit(InputError):
    default_code = "NON_UNIT"


class ConvergenceDomain(InputError):
    default_code = "CONVERGENCE_DOMAIN"


class WeightIncongruent(InputError):
    default_code = "WEIGHT_INCONGRUENT"


class CacheConflict(InputError):
    default_code = "CACHE_CONFLICT"


# ─── Numerical certificate failures (exit code 3) ───────────────────────────

class NumericalError(BianchiError):
    exit_code = 3
    default_code = "NUMERICAL_ERROR"


class QuadratureBudgetExceeded(NumericalError):
    default_code = "QUADRATURE_BUDGET_EXCEEDED"


class CertificateFailure(NumericalError):
    default_code = "CERTIFICATE_FAILURE"


class TFloorViolated(NumericalError):
    default_code = "T_FLOOR_VIOLATED"


class Ambiguous(NumericalError):
    default_code = "AMBIGUOUS"


# ─── Unsupported scope (exit code 4) ────────────────────────────────────────

class ScopeError(BianchiError):
    exit_code = 4
    default_code = "UNSUPPORTED_SCOPE"


class UnsupportedRamification(ScopeError):
    default_code = "UNSUPPORTED_RAMIFICATION"


class WildConductorUnsupported(ScopeError):
    default_code = "WILD_CONDUCTOR_UNSUPPORTED"


class UnsupportedCusp(ScopeError):
    default_code = "UNSUPPORTED_CUSP"


class IrregularForm(ScopeError):
    default_code = "IRREGULAR_FORM"


class RootsNotDistinguishable(IrregularForm):
    default_code = "ROOTS_NOT_DISTINGUISHABLE"
