"""Independent classical oracle for critical L-values.

For a newform f of weight w = k+2, level N, root number eps and a split t0,

    Lambda(f, s) = sum_n a_n [ (sqrt(N)/(2 pi n))^s Gamma(s, 2 pi n t0 / sqrt(N))
                   + eps (sqrt(N)/(2 pi n))^(w-s) Gamma(w-s, 2 pi n / (t0 sqrt(N))) ]

and L(f, s) = Lambda(f, s) / ((sqrt(N)/2 pi)^s Gamma(s)). The value must not
depend on t0, so the series is evaluated at two splits and their difference
is the certificate. A wrong level or root number shows up as a mismatch.

A base change factors as L(F, s) = L(f, s) L(f x chi_D, s), which gives
Lambda(F, trivial type (j, j)) independently of the Bianchi engine.
"""
import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import mpmath

import config
from errors import CertificateFailure, InputError, InsufficientCoefficients
from forms.newform_data import ClassicalNewformData, generate_coefficients
from quadfield import ImagQuadField, kronecker_symbol
from reports import format_number

log = logging.getLogger(__name__)

# the certificate compares these two splits
ORACLE_SPLITS = ("1", "1.2")


@dataclass(frozen=True)
class OracleValue:
    """L(f, s) from the classical series, with its split-point certificate."""

    label: str
    s: int
    value: mpmath.mpf
    abs_error: mpmath.mpf
    terms_used: int
    level: int
    root_number: int

    def to_record(self):
        return {
            "kind": "oracle",
            "form": self.label,
            "s": self.s,
            "value": format_number(self.value, 30),
            "certified_abs_error": format_number(self.abs_error, 5),
            "terms_used": self.terms_used,
            "level": self.level,
            "root_number": self.root_number,
        }


def oracle_terms(level: int, prec: int, t_min) -> int:
    """Number of Dirichlet coefficients for the tails to drop below 10^-prec."""
    with mpmath.workdps(20):
        x = (prec + config.GUARD_DIGITS) * mpmath.log(10) + 10
        return int(mpmath.ceil(x * mpmath.sqrt(level) / (2 * mpmath.pi * t_min))) + 1


def _with_coefficients(newform: ClassicalNewformData, n_max: int) -> ClassicalNewformData:
    """newform itself if it knows a_ell up to n_max, else regenerated from its source."""
    if not newform.missing_primes(n_max):
        return newform
    if not newform.source:
        newform.require(n_max)
    log.info("%s: regenerating coefficients up to %d from source", newform.label, n_max)
    generated = generate_coefficients(newform.source, n_max)
    for ell, a in newform.coefficients.items():
        if ell in generated and generated[ell] != a:
            raise InputError(f"{newform.label}: listed a_{ell} = {a} disagrees with the source value {generated[ell]}")
    merged = dict(generated)
    merged.update(newform.coefficients)
    return dataclasses.replace(newform, coefficients=merged, bound=n_max)


def twisted_coefficients(newform: ClassicalNewformData, n_max: int, twist_disc: Optional[int] = None) -> List[int]:
    """[a_1 .. a_n_max], multiplied by chi_disc(n) for a twist."""
    an = newform.an_list(n_max)
    if twist_disc is None:
        return an
    return [a * kronecker_symbol(twist_disc, n) for n, a in enumerate(an, start=1)]


def _completed(an: List[int], level: int, weight: int, eps: int, s: int, t0) -> mpmath.mpf:
    root_n = mpmath.sqrt(level)
    total = mpmath.mpf(0)
    for n, a in enumerate(an, start=1):
        if a == 0:
            continue
        scale = root_n / (2 * mpmath.pi * n)
        front = scale ** s * mpmath.gammainc(s, 2 * mpmath.pi * n * t0 / root_n)
        back = scale ** (weight - s) * mpmath.gammainc(weight - s, 2 * mpmath.pi * n / (t0 * root_n))
        total += a * (front + eps * back)
    return total


def classical_lvalue_oracle(
    newform: ClassicalNewformData,
    s: int,
    twist_disc: Optional[int] = None,
    prec: Optional[int] = None,
    root_number: Optional[int] = None,
) -> OracleValue:
    """
    L(f, s), or L(f x chi_disc, s), at an integer point of the critical strip.

    Args:
        newform: classical newform data with Atkin-Lehner signs
        s: critical point, 1 <= s <= k+1
        twist_disc: fundamental discriminant of the quadratic twist, coprime to N
        prec: decimal digits
        root_number: override of the root number of f (before twisting)

    Raises:
        MissingRootNumber: no Atkin-Lehner data and no override
        InsufficientCoefficients: too few a_ell and no source to regenerate them
        CertificateFailure: the two splits disagree (wrong level or root number)
    """
    prec = prec or config.DEFAULT_PRECISION
    weight = newform.weight
    if not 1 <= s <= weight - 1:
        raise InputError(f"s = {s} is outside the critical strip 1..{weight - 1}")
    eps = root_number if root_number is not None else newform.root_number()
    level = newform.level
    label = newform.label
    if twist_disc is not None:
        if math.gcd(level, twist_disc) != 1:
            raise InputError(f"twist by {twist_disc} is not coprime to the level {level}")
        eps = eps * kronecker_symbol(twist_disc, -level)
        level = level * twist_disc * twist_disc
        label = f"{label}x{twist_disc}"

    with mpmath.workdps(20):
        t_min = 1 / max(mpmath.mpf(t) for t in ORACLE_SPLITS)
    n_max = oracle_terms(level, prec, t_min)
    try:
        data = _with_coefficients(newform, n_max)
    except InsufficientCoefficients:
        log.warning("%s: %d coefficients needed, bound is %d", newform.label, n_max, newform.bound)
        raise
    an = twisted_coefficients(data, n_max, twist_disc)

    with mpmath.workdps(prec + config.GUARD_DIGITS):
        values = [_completed(an, level, weight, eps, s, mpmath.mpf(t)) for t in ORACLE_SPLITS]
        magnitude = max(abs(v) for v in values)
        # a central zero leaves only cancellation noise, judged against the term scale
        scale = mpmath.fsum(abs(a) * (mpmath.sqrt(level) / (2 * mpmath.pi * n)) ** s
                            for n, a in enumerate(an[:50], start=1))
        diff = abs(values[0] - values[1])
        tol = max(mpmath.mpf(10) ** -(prec - config.GUARD_DIGITS), mpmath.mpf(config.TOLERANCE_FLOOR))
        if diff > tol * max(magnitude, scale):
            raise CertificateFailure(
                f"{label}: split points {ORACLE_SPLITS[0]} and {ORACLE_SPLITS[1]} disagree by "
                f"{mpmath.nstr(diff, 5)}; level {level} or root number {eps} is wrong"
            )
        gamma_factor = (mpmath.sqrt(level) / (2 * mpmath.pi)) ** s * mpmath.gamma(s)
        value = values[0] / gamma_factor
        abs_error = diff / gamma_factor
    log.debug("oracle %s at s=%d: %d terms, certificate %s", label, s, n_max, mpmath.nstr(abs_error, 3))
    return OracleValue(label, s, +value, +abs_error, n_max, level, eps)


def base_change_lambda_oracle(
    newform: ClassicalNewformData, field: ImagQuadField, j: int, prec: Optional[int] = None
) -> OracleValue:
    """
    Lambda(F, psi) for the base change F of f to field and psi of trivial type (j, j).

    L(F, j+1) = L(f, j+1) L(f x chi_D, j+1) and the Gamma normalisation
    Gamma(j+1)^2 / (2 pi i)^(2j+2) turn into the real factor
    Gamma(j+1)^2 (-1)^(j+1) / (2 pi)^(2j+2).
    """
    prec = prec or config.DEFAULT_PRECISION
    if not 0 <= j <= newform.k:
        raise InputError(f"type ({j}, {j}) is outside 0..{newform.k}")
    untwisted = classical_lvalue_oracle(newform, j + 1, prec=prec)
    twisted = classical_lvalue_oracle(newform, j + 1, twist_disc=field.disc, prec=prec)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        factor = mpmath.gamma(j + 1) ** 2 * (-1) ** (j + 1) / (2 * mpmath.pi) ** (2 * j + 2)
        value = factor * untwisted.value * twisted.value
        abs_error = abs(factor) * (
            abs(untwisted.value) * twisted.abs_error + abs(twisted.value) * untwisted.abs_error
        )
    return OracleValue(
        f"{newform.label}/K{field.d}",
        j + 1,
        +value,
        +abs_error,
        untwisted.terms_used + twisted.terms_used,
        untwisted.level,
        untwisted.root_number * twisted.root_number,
    )
