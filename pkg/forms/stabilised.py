"""p-stabilisation of a Bianchi eigenform at every prime above p.

For each stabilised prime P with chosen root alpha_P (and beta_P the other
root) the coefficients are

    c'(m) = sum over subsets S of the primes of prod_{P in S} (-beta_P) * c(m / pi_S)

with c(m / pi_S) = 0 when pi_S does not divide m. This is the one-prime rule
c'(m) = c(m) - beta_P c(m / P) applied successively.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

import mpmath
import sympy

import config
from coefficient_cache import CoefficientMemo
from errors import InputError, IrregularForm, LevelNotCoprime, RootsNotDistinguishable
from forms.base import BianchiForm
from padic.hecke_roots import HeckeRoot, hensel_hecke_roots
from quadfield import PrincipalIdeal, splitting_type

log = logging.getLogger(__name__)


class SlopeClass(Enum):
    SMALL = "small"
    CRITICAL = "critical"


@dataclass(frozen=True)
class SlopeClassification:
    kind: SlopeClass
    slopes: Tuple[Tuple[PrincipalIdeal, Fraction], ...]
    bounds: Tuple[Tuple[PrincipalIdeal, Fraction], ...]

    def is_small(self) -> bool:
        return self.kind is SlopeClass.SMALL


class StabilisedForm(BianchiForm):
    """F^alpha at all primes above p."""

    def __init__(self, base: BianchiForm, p: int, roots: Mapping[PrincipalIdeal, HeckeRoot]):
        self.base = base
        self.p = p
        self.field = base.field
        self.k = base.k
        self.fricke_sign = base.fricke_sign
        self.primes: Tuple[PrincipalIdeal, ...] = tuple(roots)
        self.roots: Dict[PrincipalIdeal, HeckeRoot] = dict(roots)
        level = base.level
        for prime in self.primes:
            level = level * prime
        self.level = level
        tags = "".join("+" if roots[P].branch > 0 else "-" for P in self.primes)
        self.label = f"{base.label}/stab{p}{tags}"
        self._memo = CoefficientMemo()

    def __repr__(self) -> str:
        return f"StabilisedForm({self.label}, level={self.level})"

    # ─── Roots ──────────────────────────────────────────────────────────────

    def alpha(self, prime: PrincipalIdeal) -> HeckeRoot:
        return self.roots[prime]

    def beta(self, prime: PrincipalIdeal) -> HeckeRoot:
        return self.roots[prime].conjugate()

    @property
    def slopes(self) -> Dict[PrincipalIdeal, Fraction]:
        return {P: self.roots[P].valuation for P in self.primes}

    def subsets(self) -> List[Tuple[PrincipalIdeal, ...]]:
        return [S for n in range(len(self.primes) + 1) for S in itertools.combinations(self.primes, n)]

    # ─── Coefficients ───────────────────────────────────────────────────────

    def coefficient(self, m, denominator=None) -> sympy.Expr:
        ideal = self._integral_part(m, denominator)
        if ideal is None:
            return sympy.Integer(0)
        key = (ideal.gen.a, ideal.gen.b)
        return self._memo.get_or_compute(key, lambda: self._compute(ideal))

    def _compute(self, ideal: PrincipalIdeal) -> sympy.Expr:
        total = sympy.Integer(0)
        for S in self.subsets():
            pi_s = self.field.element(1)
            gamma = sympy.Integer(1)
            for prime in S:
                pi_s = pi_s * prime.gen
                gamma *= -self.beta(prime).exact
            c = self.base.coefficient(ideal.gen, denominator=pi_s)
            if c:
                total += gamma * c
        return sympy.expand(total)

    def coefficient_complex(self, m, prec) -> mpmath.mpc:
        ideal = self._integral_part(m, None)
        if ideal is None:
            return mpmath.mpc(0)
        with mpmath.workdps(prec + 5):
            total = mpmath.mpc(0)
            for S in self.subsets():
                pi_s = self.field.element(1)
                gamma = mpmath.mpc(1)
                for prime in S:
                    pi_s = pi_s * prime.gen
                    gamma *= -self.beta(prime).to_complex(prec)
                c = self.base.coefficient(ideal.gen, denominator=pi_s)
                if c:
                    total += gamma * c
        return +total

    def with_fricke_sign(self, sign: Optional[int]) -> "StabilisedForm":
        other = super().with_fricke_sign(sign)
        other.base = self.base.with_fricke_sign(sign)
        return other

    def up_eigen_check(self, prime: PrincipalIdeal, m: PrincipalIdeal) -> bool:
        """Exact check of c'(P m) = alpha_P c'(m)."""
        lhs = self.coefficient(prime * m)
        rhs = self.roots[prime].exact * self.coefficient(m)
        return sympy.simplify(sympy.expand(lhs - rhs)) == 0


def _parse_choice(choice: Union[int, str, None]) -> int:
    if choice in (None, 1, "plus", "+"):
        return 1
    if choice in (-1, "minus", "-"):
        return -1
    raise InputError(f"unknown root choice {choice!r}; use 'plus' or 'minus'")


def stabilise(
    form: BianchiForm,
    p: int,
    choices: Optional[Mapping[Union[PrincipalIdeal, int], Union[int, str]]] = None,
    prec: Optional[int] = None,
) -> StabilisedForm:
    """
    Stabilise ``form`` at every prime above p.

    Args:
        form: a form of level coprime to p
        p: rational prime
        choices: per-prime root choice keyed by prime ideal or by its index in
            the splitting; "plus" (default) is the root of smaller valuation
        prec: p-adic precision for the lifted unit roots

    Raises:
        LevelNotCoprime: p divides N(level)
        RootsNotDistinguishable: a Hecke polynomial has a double root
    """
    prec = prec or config.PADIC_PRECISION
    if form.level is None:
        raise InputError(f"{form.label} has no level to stabilise")
    if form.level.norm % p == 0:
        raise LevelNotCoprime(f"{p} divides the norm of the level {form.level} of {form.label}")
    choices = dict(choices or {})
    split = splitting_type(form.field, p)
    roots: Dict[PrincipalIdeal, HeckeRoot] = {}
    for i, prime in enumerate(split.primes):
        branch = _parse_choice(choices.get(prime, choices.get(i)))
        lam = int(form.coefficient(prime))
        try:
            plus, minus = hensel_hecke_roots(lam, p, form.k, prec, norm_p=prime.norm)
        except IrregularForm as e:
            raise RootsNotDistinguishable(f"{form.label} at {prime}: {e.message}") from e
        roots[prime] = plus if branch > 0 else minus
    stabilised = StabilisedForm(form, p, roots)
    log.info("stabilised %s at %d: slopes %s", form.label, p,
             {repr(P): str(v) for P, v in stabilised.slopes.items()})
    return stabilised


def slope_class(form: StabilisedForm) -> SlopeClassification:
    """Small slope iff v(alpha_P) < (k+1)/e_P at every stabilised prime."""
    e = splitting_type(form.field, form.p).ramification_index
    bound = Fraction(form.k + 1, e)
    slopes = tuple(form.slopes.items())
    small = all(v < bound for _, v in slopes)
    return SlopeClassification(
        SlopeClass.SMALL if small else SlopeClass.CRITICAL,
        slopes,
        tuple((P, bound) for P, _ in slopes),
    )
