"""Base change of classical newforms to K.

Coefficients are defined through L(f_K, s) = L(f, s) L(f x chi_disc, s):

    ell split,    q | ell:  c(q) = a_ell
    ell inert,    q = (ell): c(q) = a_ell^2 - 2 ell^(k+1)   (a_ell^2 if ell | N)
    ell ramified, q^2 = (ell): c(q) = a_ell                  (ell must not divide N)

Prime powers follow the Hecke recursion off the level and c(q^r) = c(q)^r on it.
"""
import logging
from typing import Optional

import mpmath
import sympy

from coefficient_cache import CoefficientMemo, CoefficientStore
from errors import InputError, UnsupportedRamification
from forms.base import BianchiForm
from forms.newform_data import ClassicalNewformData
from quadfield import (
    ImagQuadField,
    PrincipalIdeal,
    SplittingKind,
    prime_below,
    splitting_type,
)

log = logging.getLogger(__name__)


class BaseChangeForm(BianchiForm):
    """The base change to K of a classical newform of level N coprime to disc."""

    def __init__(self, newform: ClassicalNewformData, field: ImagQuadField,
                 fricke_sign: Optional[int] = None, store: Optional[CoefficientStore] = None):
        """
        Initialize the base change.

        Args:
            newform: classical newform data
            field: target field K
            fricke_sign: epsilon(n) if known (+1/-1); None leaves it unknown
            store: optional persistent coefficient store

        Raises:
            UnsupportedRamification: gcd(N, disc) > 1
        """
        if sympy.gcd(newform.level, field.disc) != 1:
            raise UnsupportedRamification(
                f"{newform.label}: level {newform.level} shares a factor with disc {field.disc}"
            )
        if fricke_sign not in (None, 1, -1):
            raise InputError(f"fricke sign must be +1 or -1, got {fricke_sign}")
        self.newform = newform
        self.field = field
        self.k = newform.k
        self.level = field.ideal(newform.level)
        self.nu = field.element(newform.level)
        self.label = f"{newform.label}/K{field.d}"
        self.fricke_sign = fricke_sign
        self._memo = CoefficientMemo(store, self.label, field.d)

    def __repr__(self) -> str:
        return f"BaseChangeForm({self.label}, k={self.k}, level={self.level})"

    @property
    def memo(self) -> CoefficientMemo:
        return self._memo

    # ─── Coefficients ───────────────────────────────────────────────────────

    def prime_coefficient(self, prime: PrincipalIdeal) -> int:
        """c(q) for a prime ideal q."""
        ell = prime_below(prime)
        split = splitting_type(self.field, ell)
        a = self.newform.a(ell)
        bad = self.newform.level % ell == 0
        if split.kind is SplittingKind.INERT:
            return a * a if bad else a * a - 2 * ell ** (self.k + 1)
        if split.kind is SplittingKind.RAMIFIED and bad:
            raise UnsupportedRamification(f"{ell} divides both the level and the discriminant")
        return a

    def prime_power_coefficient(self, prime: PrincipalIdeal, e: int) -> int:
        c = self.prime_coefficient(prime)
        if prime.divides(self.level.gen):
            return c ** e
        n = prime.norm ** (self.k + 1)
        prev, cur = 1, c
        for _ in range(e - 1):
            prev, cur = cur, c * cur - n * prev
        return cur if e else 1

    def coefficient(self, m, denominator=None) -> int:
        ideal = self._integral_part(m, denominator)
        if ideal is None:
            return 0
        key = (ideal.gen.a, ideal.gen.b)
        return self._memo.get_or_compute(key, lambda: self._compute(ideal))

    def _compute(self, ideal: PrincipalIdeal) -> int:
        value = 1
        for prime, e in ideal.factorization:
            value *= self.prime_power_coefficient(prime, e)
        return value

    def coefficient_complex(self, m, prec) -> mpmath.mpc:
        return mpmath.mpc(self.coefficient(m))

    # ─── Checks ─────────────────────────────────────────────────────────────

    def classical_fricke_sign(self) -> Optional[int]:
        """(-1)^(k+1) chi_disc(-N), offered when Atkin-Lehner data are present."""
        if not self.newform.has_atkin_lehner():
            return None
        return (-1) ** (self.k + 1) * self.field.kronecker(-self.newform.level)

    def euler_factor_identity(self, ell: int) -> bool:
        """Exact check of the degree-4 Euler factor at ell (ell must not divide N*disc)."""
        X = sympy.Symbol("X")
        a = self.newform.a(ell)
        n = ell ** (self.k + 1)
        chi = self.field.kronecker(ell)
        lhs = sympy.expand((1 - a * X + n * X ** 2) * (1 - chi * a * X + n * X ** 2))
        split = splitting_type(self.field, ell)
        rhs = sympy.Integer(1)
        for prime in split.primes:
            f = split.residue_degree
            c = self.prime_coefficient(prime)
            rhs *= 1 - c * X ** f + prime.norm ** (self.k + 1) * X ** (2 * f)
        ok = sympy.expand(lhs - rhs) == 0
        if not ok:
            log.warning("Euler factor mismatch at %d for %s", ell, self.label)
        return ok


def base_change(newform: ClassicalNewformData, field: ImagQuadField,
                fricke_sign: Optional[int] = None, store: Optional[CoefficientStore] = None) -> BaseChangeForm:
    """Build the base change of newform to field."""
    form = BaseChangeForm(newform, field, fricke_sign=fricke_sign, store=store)
    log.debug("base change %s built; level %s", form.label, form.level)
    return form
