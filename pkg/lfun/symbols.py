"""Values of the modular symbol of a Bianchi form at a cusp, and period rationality.

phi({a} - {oo}) = sum_{q,r} c_qr(a) (Y - a X)^(k-q) X^q (Yb - ab Xb)^(k-r) Xb^r

where Xb, Yb stand for the conjugate variables. The c_qr come from
``lfun.lvalues.c_qr``; this module only assembles them.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import mpmath
import sympy

import config
from errors import InputError
from forms.base import BianchiForm
from hecke_chars import element_to_sympy
from lfun.lvalues import CuspValue, c_qr, relative_tolerance
from quadfield import Cusp

log = logging.getLogger(__name__)

X, Y, XB, YB = sympy.symbols("X Y Xb Yb")


def _to_sympy(z: mpmath.mpc, digits: int) -> sympy.Expr:
    return sympy.Float(mpmath.nstr(z.real, digits), digits) + sympy.I * sympy.Float(mpmath.nstr(z.imag, digits), digits)


@dataclass(frozen=True)
class ModularSymbolValue:
    """The (k+1)^2 coefficients c_qr(a) of phi({a} - {oo})."""

    form: str
    cusp: Cusp
    k: int
    coefficients: Dict[Tuple[int, int], CuspValue]
    precision: int

    @property
    def abs_error(self) -> mpmath.mpf:
        return sum((v.abs_error for v in self.coefficients.values()), mpmath.mpf(0))

    def vector(self):
        """c_qr(a) ordered by (q, r)."""
        return [self.coefficients[key].value for key in sorted(self.coefficients)]

    def basis_polynomial(self, q: int, r: int) -> sympy.Expr:
        a = element_to_sympy(self.cusp.numerator) / element_to_sympy(self.cusp.denominator)
        k = self.k
        return (Y - a * X) ** (k - q) * X ** q * (YB - sympy.conjugate(a) * XB) ** (k - r) * XB ** r

    def polynomial(self, digits: Optional[int] = None) -> sympy.Expr:
        digits = digits or min(self.precision, 30)
        total = sympy.Integer(0)
        for (q, r), v in sorted(self.coefficients.items()):
            if v.value == 0:
                continue
            total += _to_sympy(v.value, digits) * self.basis_polynomial(q, r)
        return sympy.expand(total)


def modular_symbol_value(form: BianchiForm, cusp: Cusp, prec: Optional[int] = None,
                         split_point=None) -> ModularSymbolValue:
    """Every c_qr(a), 0 <= q, r <= k, at one cusp."""
    prec = prec or config.DEFAULT_PRECISION
    table = {}
    for q in range(form.k + 1):
        for r in range(form.k + 1):
            table[(q, r)] = c_qr(form, cusp, q, r, prec, split_point)
    log.debug("modular symbol of %s at %s: %d coefficients", form.label, cusp, len(table))
    return ModularSymbolValue(form.label, cusp, form.k, table, prec)


# ─── Period rationality ─────────────────────────────────────────────────────

@dataclass(frozen=True)
class RationalityCheck:
    """Minimal polynomials recognised for the real and imaginary parts of a ratio."""

    ratio: mpmath.mpc
    real_poly: Optional[Tuple[int, ...]]
    imag_poly: Optional[Tuple[int, ...]]
    imag_vanishes: bool

    @property
    def recognised(self) -> bool:
        return self.real_poly is not None and (self.imag_vanishes or self.imag_poly is not None)


def _findpoly(x, degree: int, maxcoeff: int) -> Optional[Tuple[int, ...]]:
    poly = mpmath.findpoly(x, degree, maxcoeff=maxcoeff)
    return tuple(int(c) for c in poly) if poly else None


def algebraicity_check(values: Sequence, degree: int = 2, maxcoeff: int = 10 ** 6,
                       prec: Optional[int] = None) -> RationalityCheck:
    """
    Integer-relation search on values[0] / values[1].

    Ratios of L-values of one form twisted by characters with values in a
    small field lie in that field once the period cancels; each part of the
    ratio is handed to PSLQ for a polynomial of degree <= ``degree``.
    """
    if len(values) != 2:
        raise InputError("algebraicity_check compares exactly two values")
    prec = prec or config.DEFAULT_PRECISION
    # PSLQ needs a few digits of headroom over the recognised coefficients
    digits = max(prec - config.GUARD_DIGITS, 15)
    with mpmath.workdps(digits):
        a, b = mpmath.mpc(values[0]), mpmath.mpc(values[1])
        if b == 0:
            raise InputError("the denominator value vanishes")
        ratio = a / b
        tol = relative_tolerance(prec) * max(abs(ratio), 1)
        real_poly = _findpoly(ratio.real, degree, maxcoeff)
        imag_vanishes = abs(ratio.imag) <= tol
        imag_poly = None if imag_vanishes else _findpoly(ratio.imag, degree, maxcoeff)
    log.debug("ratio %s: real %s imag %s", mpmath.nstr(ratio, 10), real_poly, imag_poly)
    return RationalityCheck(ratio, real_poly, imag_poly, imag_vanishes)
