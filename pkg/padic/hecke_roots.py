"""Roots of Hecke polynomials X^2 - lambda X + N(p)^(k+1).

Roots are carried exactly as (lambda + branch * sqrt(disc)) / 2 with
disc = lambda^2 - 4 N(p)^(k+1). Valuations are exact rationals normalised by
v_p(p) = 1. When lambda is a p-adic unit the root of valuation 0 lies in Z_p
and is also lifted by Newton iteration.

Branch +1 ("plus") is the root of smaller valuation. This fixes the p-adic
embedding of Q(sqrt(disc)); the complex embedding takes sqrt(disc) in the
upper half-plane.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import mpmath
import sympy

from errors import InputError, IrregularForm
from padic.numbers import PadicNumber, valuation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeckeRoot:
    """One root of X^2 - trace X + norm."""

    p: int
    trace: int
    norm: int
    branch: int
    valuation: Fraction
    padic: Optional[PadicNumber] = None

    @property
    def discriminant(self) -> int:
        return self.trace * self.trace - 4 * self.norm

    @property
    def exact(self) -> sympy.Expr:
        return (sympy.Integer(self.trace) + self.branch * sympy.sqrt(sympy.Integer(self.discriminant))) / 2

    def conjugate(self) -> "HeckeRoot":
        """The other root with its own valuation."""
        v_other = Fraction(valuation(self.norm, self.p)) - self.valuation
        other_padic = None
        if self.padic is not None:
            other_padic = PadicNumber.from_rational(self.norm, self.p, self.padic.precision) / self.padic
        return HeckeRoot(self.p, self.trace, self.norm, -self.branch, v_other, other_padic)

    def to_complex(self, prec: int) -> mpmath.mpc:
        with mpmath.workdps(prec + 5):
            root = mpmath.sqrt(mpmath.mpc(self.discriminant))
            value = (self.trace + self.branch * root) / 2
        return +value

    def is_ordinary(self) -> bool:
        return self.valuation == 0

    def __str__(self) -> str:
        tag = "+" if self.branch > 0 else "-"
        return f"({self.trace} {tag} sqrt({self.discriminant}))/2 [v={self.valuation}]"


def _newton_unit_root(lam: int, norm: int, p: int, prec: int) -> PadicNumber:
    """The root congruent to lambda mod p, lifted to p^prec."""
    modulus = p ** prec
    x = lam % modulus
    # f'(x) = 2x - lambda is a unit at the unit root (it is congruent to alpha - beta)
    for _ in range(prec.bit_length() + 2):
        fx = (x * x - lam * x + norm) % modulus
        if fx == 0:
            break
        dfx = (2 * x - lam) % modulus
        x = (x - fx * pow(dfx, -1, modulus)) % modulus
    assert (x * x - lam * x + norm) % modulus == 0, (lam, norm, p)
    return PadicNumber.from_rational(x, p, prec)


def hensel_hecke_roots(lam: int, p: int, k: int, prec: int, norm_p: Optional[int] = None) -> Tuple[HeckeRoot, HeckeRoot]:
    """
    Roots of X^2 - lam X + N(p)^(k+1), smaller valuation first.

    Args:
        lam: Hecke eigenvalue at the prime (an exact integer)
        p: rational prime below the prime ideal
        k: weight parameter
        prec: p-adic precision of the lifted unit root
        norm_p: N(p) (defaults to p; p^2 for an inert prime)

    Returns:
        (plus, minus)

    Raises:
        IrregularForm: the two roots coincide
    """
    norm_p = p if norm_p is None else norm_p
    if norm_p % p:
        raise InputError(f"N(p) = {norm_p} is not a power of {p}")
    norm = norm_p ** (k + 1)
    disc = lam * lam - 4 * norm
    if disc == 0:
        raise IrregularForm(f"X^2 - {lam}X + {norm} has a double root", error_code="IRREGULAR")

    big_v = valuation(norm, p)
    v_lam = valuation(lam, p)
    if 2 * v_lam < big_v:
        v_plus, v_minus = Fraction(v_lam), Fraction(big_v - v_lam)
    else:
        v_plus = v_minus = Fraction(big_v, 2)

    plus_padic = minus_padic = None
    if v_lam == 0:
        plus_padic = _newton_unit_root(lam, norm, p, prec)
        minus_padic = PadicNumber.from_rational(norm, p, prec) / plus_padic

    plus = HeckeRoot(p, lam, norm, 1, v_plus, plus_padic)
    minus = HeckeRoot(p, lam, norm, -1, v_minus, minus_padic)
    log.debug("Hecke roots at %d (lambda=%d, k=%d): valuations %s, %s", p, lam, k, v_plus, v_minus)
    return plus, minus


def vieta_holds(plus: HeckeRoot, minus: HeckeRoot) -> bool:
    """Exact check of alpha + beta = lambda and alpha * beta = N(p)^(k+1)."""
    s = sympy.simplify(plus.exact + minus.exact - plus.trace)
    n = sympy.simplify(sympy.expand(plus.exact * minus.exact) - plus.norm)
    return s == 0 and n == 0
