"""Teichmueller characters, the p-adic log/exp and the <.>^s characters of Z_p^x.

Every unit factors as z = w_Tm(z) <z> with w_Tm(z) a root of unity and
<z> = 1 mod p^r_p, where r_p = 2 for p = 2 and 1 otherwise (the radius on
which exp converges). Then <z>^s = exp(s log <z>).

All arithmetic is on integers modulo p^M with M a few digits above the
requested precision; series are truncated by the valuation of their terms.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Union

import config
from errors import ConvergenceDomain, InputError, NonUnit, WeightIncongruent
from padic.numbers import PadicNumber, valuation

log = logging.getLogger(__name__)

Scalar = Union[int, Fraction, PadicNumber]


def convergence_radius(p: int) -> int:
    return 2 if p == 2 else 1


def _as_padic(z: Scalar, p: int, prec: int) -> PadicNumber:
    if isinstance(z, PadicNumber):
        if z.p != p:
            raise InputError(f"{z} is not {p}-adic")
        return z
    return PadicNumber.from_rational(Fraction(z), p, prec)


def _unit(z: Scalar, p: int, prec: Optional[int]) -> PadicNumber:
    prec = prec or config.PADIC_PRECISION
    x = _as_padic(z, p, prec)
    if not x.is_unit():
        raise NonUnit(f"{z} is not a {p}-adic unit")
    return x


# ─── Teichmueller decomposition ─────────────────────────────────────────────

def teichmuller(z: Scalar, p: int, prec: Optional[int] = None) -> PadicNumber:
    """The root of unity congruent to z mod p^r_p (mod 4 for p = 2)."""
    x = _unit(z, p, prec)
    m = x.precision
    modulus = p ** m
    if p == 2:
        return PadicNumber.from_residue(1 if x.unit % 4 == 1 else modulus - 1, p, m)
    w = x.unit % p
    # z -> z^p contracts onto the root of unity: one more p-adic digit per step
    for _ in range(m):
        w = pow(w, p, modulus)
    return PadicNumber.from_residue(w, p, m)


def bracket(z: Scalar, p: int, prec: Optional[int] = None) -> PadicNumber:
    """<z> = z / w_Tm(z)."""
    x = _unit(z, p, prec)
    return x / teichmuller(x, p, prec)


# ─── log and exp ────────────────────────────────────────────────────────────

def padic_log(x: PadicNumber) -> PadicNumber:
    """log_p(x) for x = 1 mod p, from the series sum (-1)^(i+1) t^i / i."""
    p = x.p
    t = x - 1
    if t.is_zero():
        return PadicNumber.zero(p, t.precision)
    if t.valuation < 1:
        raise ConvergenceDomain(f"log_p needs x = 1 mod {p}; x - 1 has valuation {t.valuation}")
    target = t.absolute_precision
    v = t.valuation
    # headroom for the divisions by p^v_p(i)
    M = target + int(math.log(target * p + 1, p)) + 2
    modulus = p ** M
    u = t.unit
    total = 0
    i = 1
    while i * v - math.floor(math.log(i, p) + 1e-9) < M + 1:
        vi = valuation(i, p)
        shift = i * v - vi
        if shift < M:
            term = pow(u, i, modulus) * pow(i // p ** vi, -1, modulus) * p ** shift
            total += term if i % 2 else -term
        i += 1
    log.debug("log_%d: %d series terms", p, i - 1)
    return PadicNumber.from_residue(total % modulus, p, target)


def _factorial_valuation(n: int, p: int) -> int:
    total, q = 0, p
    while q <= n:
        total += n // q
        q *= p
    return total


def padic_exp(y: PadicNumber) -> PadicNumber:
    """exp_p(y) for v(y) >= r_p, from the series sum y^i / i!."""
    p = y.p
    if y.is_zero():
        return PadicNumber.from_residue(1, p, max(y.precision, 1))
    r_p = convergence_radius(p)
    if y.valuation < r_p:
        raise ConvergenceDomain(f"exp_p needs valuation >= {r_p}; got {y.valuation}")
    target = y.absolute_precision
    v = y.valuation
    M = target + 2
    modulus = p ** M
    u = y.unit
    total = 1
    unit_factorial = 1
    i = 1
    # term valuation is at least i (v - 1/(p-1))
    while Fraction(i) * (v - Fraction(1, p - 1)) < M + 1:
        vi = valuation(i, p)
        unit_factorial = unit_factorial * (i // p ** vi) % modulus
        shift = i * v - _factorial_valuation(i, p)
        if shift < M:
            total += pow(u, i, modulus) * pow(unit_factorial, -1, modulus) * p ** shift
        i += 1
    return PadicNumber.from_residue(total % modulus, p, target)


def bracket_power(z: Scalar, s: Scalar, p: int, prec: Optional[int] = None) -> PadicNumber:
    """
    <z>^s = exp(s log <z>).

    Raises:
        NonUnit: z is not a unit
        ConvergenceDomain: v(s) + v(log <z>) < r_p
    """
    prec = prec or config.PADIC_PRECISION
    b = bracket(z, p, prec)
    logarithm = padic_log(b)
    if logarithm.is_zero():
        return PadicNumber.from_residue(1, p, prec)
    exponent = _as_padic(s, p, prec)
    if exponent.is_zero():
        return PadicNumber.from_residue(1, p, prec)
    if exponent.valuation + logarithm.valuation < convergence_radius(p):
        raise ConvergenceDomain(
            f"<{z}>^{s}: v(s) + v(log<z>) = {exponent.valuation + logarithm.valuation} < {convergence_radius(p)}"
        )
    return padic_exp(exponent * logarithm)


# ─── Weight characters ──────────────────────────────────────────────────────

def _check_congruent(k: int, w: int, p: int) -> None:
    modulus = 2 if p == 2 else p - 1
    if (w - k) % modulus:
        raise WeightIncongruent(f"weight {w} is not congruent to {k} mod {modulus}")


@dataclass(frozen=True)
class FamilyConstant:
    """w_Tm(N)^(k/2) <N>^(w/2), or a flag when the half power needs a root choice."""

    k: int
    weight: int
    norm: int
    value: Optional[PadicNumber]
    flagged: bool = False
    reason: str = ""


def family_constant(k: int, w: int, norm_n: int, p: int, prec: Optional[int] = None) -> FamilyConstant:
    """The level constant of the functional equation at weight w, with N = N(n) prime to p."""
    prec = prec or config.PADIC_PRECISION
    _check_congruent(k, w, p)
    root = math.isqrt(norm_n)
    if k % 2 == 0:
        tm_part = teichmuller(norm_n, p, prec) ** (k // 2)
    elif root * root == norm_n:
        tm_part = teichmuller(root, p, prec) ** k
    else:
        reason = f"k = {k} is odd and N(n) = {norm_n} is not a square"
        log.warning("family constant not evaluated: %s", reason)
        return FamilyConstant(k, w, norm_n, None, flagged=True, reason=reason)
    value = tm_part * bracket_power(norm_n, Fraction(w, 2), p, prec)
    return FamilyConstant(k, w, norm_n, value)


@dataclass(frozen=True)
class SigmaCheck:
    k: int
    weight: int
    p: int
    failures: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def sigma_decomposition_check(k: int, w: int, p: int, units: Iterable[int], norm_n: Optional[int] = None,
                              prec: Optional[int] = None) -> SigmaCheck:
    """
    Check sigma^(k,k)(x) = [w_Tm(x) <x>]^k and its move to weight w on sample units.

    With w = k mod (p-1) the Teichmueller part is unchanged, so
    w_Tm(x)^k <x>^w must equal x^w. With norm_n given, the family constant at
    weight k must reduce to N(n)^(k/2).

    Raises:
        WeightIncongruent: w is not congruent to k mod p-1 (mod 2 for p = 2)
    """
    prec = prec or config.PADIC_PRECISION
    _check_congruent(k, w, p)
    failures = []
    for x in units:
        if x % p == 0:
            raise NonUnit(f"sample {x} is not a {p}-adic unit")
        z = PadicNumber.from_rational(x, p, prec)
        tm, br = teichmuller(z, p, prec), bracket(z, p, prec)
        if tm * br != z:
            failures.append(f"{x} != w_Tm * <.>")
        if tm ** k * br ** k != z ** k:
            failures.append(f"sigma^({k},{k})({x}) decomposition")
        if tm ** k * bracket_power(z, w, p, prec) != z ** w:
            failures.append(f"weight {w} at {x}")
    if norm_n is not None:
        constant = family_constant(k, k, norm_n, p, prec)
        if not constant.flagged:
            root = math.isqrt(norm_n)
            expected = (PadicNumber.from_rational(norm_n, p, prec) ** (k // 2) if k % 2 == 0
                        else PadicNumber.from_rational(root, p, prec) ** k)
            if constant.value != expected:
                failures.append(f"family constant at weight {k} is not N(n)^(k/2)")
    if failures:
        log.warning("sigma check k=%d w=%d p=%d: %s", k, w, p, "; ".join(failures))
    return SigmaCheck(k, w, p, failures)
