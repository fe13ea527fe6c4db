"""Algebraic Hecke characters of a class-number-one imaginary quadratic field.

A character is fixed by its conductor f, a finite-order part chi on
(O_K/f)^x given on the generators computed by ``quadfield.residue_units``, and
an infinity type (q, r). On ideals coprime to f,

    psi((beta)) = chi(beta) * beta^q * conj(beta)^r

for any generator beta; the unit-compatibility condition makes this
independent of the generator. Values are kept exact and rendered to complex
numbers only on request.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import sympy

from errors import (
    AlphaNotCoprime,
    ConductorNotPPower,
    InputError,
    MalformedSpec,
    UnitIncompatible,
)
from quadfield import (
    FieldElement,
    ImagQuadField,
    PrincipalIdeal,
    ResidueGroup,
    SplittingKind,
    embed,
    residue_units,
    splitting_type,
)

log = logging.getLogger(__name__)

Factor = Tuple[FieldElement, int, int]


def _unit_phase(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class CharacterValue:
    """scalar * exp(2*pi*i*phase) * prod x^a * conj(x)^b, or exact zero."""

    phase: Fraction = Fraction(0)
    factors: Tuple[Factor, ...] = ()
    scalar: Fraction = Fraction(1)
    zero: bool = False

    @classmethod
    def zero_value(cls) -> "CharacterValue":
        return cls(zero=True, scalar=Fraction(0))

    @classmethod
    def one(cls) -> "CharacterValue":
        return cls()

    def is_zero(self) -> bool:
        return self.zero

    def __mul__(self, other: "CharacterValue") -> "CharacterValue":
        if self.zero or other.zero:
            return CharacterValue.zero_value()
        factors, scalar = _normalize(self.factors + other.factors, self.scalar * other.scalar)
        return CharacterValue(_unit_phase(self.phase + other.phase), factors, scalar)

    def inverse(self) -> "CharacterValue":
        if self.zero:
            raise ZeroDivisionError("inverse of a zero character value")
        return CharacterValue(
            _unit_phase(-self.phase),
            tuple((x, -a, -b) for x, a, b in self.factors),
            1 / self.scalar,
        )

    def to_complex(self, prec: int) -> mpmath.mpc:
        if self.zero:
            return mpmath.mpc(0)
        with mpmath.workdps(prec + 5):
            value = mpmath.mpc(mpmath.mpf(self.scalar.numerator) / self.scalar.denominator)
            if self.phase:
                value *= mpmath.expjpi(2 * mpmath.mpf(self.phase.numerator) / self.phase.denominator)
            for x, a, b in self.factors:
                z = embed(x, prec + 5)
                value *= z ** a * mpmath.conj(z) ** b
        return +value

    def to_sympy(self) -> sympy.Expr:
        if self.zero:
            return sympy.Integer(0)
        value = sympy.Rational(self.scalar.numerator, self.scalar.denominator)
        value *= sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(self.phase.numerator, self.phase.denominator))
        for x, a, b in self.factors:
            z = element_to_sympy(x)
            value *= z ** a * sympy.conjugate(z) ** b
        return value

    def abs_squared(self) -> Fraction:
        """|value|^2, exact."""
        if self.zero:
            return Fraction(0)
        result = self.scalar * self.scalar
        for x, a, b in self.factors:
            result *= Fraction(x.norm()) ** (a + b)
        return result


def _merge(factors: Iterable[Factor]) -> Tuple[Factor, ...]:
    merged: Dict[FieldElement, List[int]] = {}
    for x, a, b in factors:
        slot = merged.setdefault(x, [0, 0])
        slot[0] += a
        slot[1] += b
    return tuple((x, a, b) for x, (a, b) in merged.items() if a or b)


def _normalize(factors: Iterable[Factor], scalar: Fraction) -> Tuple[Tuple[Factor, ...], Fraction]:
    """Merge equal bases and move x^a conj(x)^a into the rational scalar."""
    out = []
    for x, a, b in _merge(factors):
        common = min(a, b)
        if common:
            scalar *= Fraction(x.norm()) ** common
        if a - common or b - common:
            out.append((x, a - common, b - common))
    return tuple(out), scalar


def element_to_sympy(x: FieldElement) -> sympy.Expr:
    root = sympy.sqrt(x.field.d)
    if x.field.d % 4 == 1:
        return sympy.Rational(2 * x.a + x.b, 2) + sympy.Rational(x.b, 2) * root
    return x.a + x.b * root


def sympy_to_mpc(expr: sympy.Expr, prec: int) -> mpmath.mpc:
    """Numerical value of an exact sympy expression at prec digits."""
    value = sympy.N(expr, prec + 5)
    re, im = value.as_real_imag()
    with mpmath.workdps(prec + 5):
        result = mpmath.mpc(mpmath.mpf(str(sympy.N(re, prec + 5))), mpmath.mpf(str(sympy.N(im, prec + 5))))
    return +result


# ─── Characters ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class HeckeCharacter:
    """A Hecke character of conductor f and infinity type (q, r)."""

    field: ImagQuadField
    conductor: PrincipalIdeal
    q: int
    r: int
    # chi(g_i) = exp(2*pi*i*phases[i]) on group.generators
    phases: Tuple[Fraction, ...]
    group: ResidueGroup = dc_field(repr=False, compare=False, hash=False)
    label: Optional[str] = dc_field(default=None, compare=False, hash=False)

    @property
    def inf_type(self) -> Tuple[int, int]:
        return (self.q, self.r)

    @property
    def ell(self) -> int:
        return self.r - self.q

    @property
    def id(self) -> str:
        if self.label:
            return self.label
        phases = ",".join(str(p) for p in self.phases)
        return f"K{self.field.d}/f={self.conductor.gen!r}/({self.q},{self.r})/[{phases}]"

    def is_trivial_finite(self) -> bool:
        return all(p == 0 for p in self.phases)

    def chi(self, x: FieldElement) -> Optional[Fraction]:
        """Phase of chi(x), or None when x is not coprime to f."""
        if self.conductor.is_unit_ideal():
            return Fraction(0)
        if x.is_zero() or not self.conductor.coprime_to(self.field.ideal(x)):
            return None
        exps = self.group.discrete_log(x)
        return _unit_phase(sum((e * p for e, p in zip(exps, self.phases)), Fraction(0)))

    def infinity_value(self, z: FieldElement) -> CharacterValue:
        """psi_infinity(z) = z^q * conj(z)^r."""
        return CharacterValue(factors=_merge([(z, self.q, self.r)]))

    def finite_value(self, x: FieldElement) -> CharacterValue:
        phase = self.chi(x)
        if phase is None:
            return CharacterValue.zero_value()
        return CharacterValue(phase=phase)


def _coerce_finite_part(
    group: ResidueGroup, spec: Union[None, str, Sequence, Mapping]
) -> Tuple[Fraction, ...]:
    n = len(group.generators)
    if spec is None or spec == "trivial":
        return tuple(Fraction(0) for _ in range(n))
    if isinstance(spec, Mapping):
        values = [None] * n
        for gen, root in spec.items():
            gen_el = gen if isinstance(gen, FieldElement) else group.modulus.field(tuple(gen))
            hits = [i for i, g in enumerate(group.generators) if group.modulus.congruent(g, gen_el)]
            if not hits:
                raise MalformedSpec(
                    f"{gen_el} is not one of the generators {list(group.generators)} of (O/{group.modulus})^x"
                )
            values[hits[0]] = root
        if any(v is None for v in values):
            raise MalformedSpec(f"finite part must assign every generator {list(group.generators)}")
        spec = values
    spec = list(spec)
    if len(spec) != n:
        raise MalformedSpec(f"finite part has {len(spec)} entries, (O/{group.modulus})^x has {n} generators")
    phases = []
    for (k, m), order in zip(spec, group.orders):
        if m <= 0:
            raise MalformedSpec(f"root of unity ({k},{m}) has a non-positive order")
        phase = Fraction(k, m)
        if (phase * order).denominator != 1:
            raise MalformedSpec(f"root e^(2 pi i {k}/{m}) has order not dividing the generator order {order}")
        phases.append(_unit_phase(phase))
    return tuple(phases)


def make_character(
    field: ImagQuadField,
    f: Union[PrincipalIdeal, FieldElement, int, Tuple[int, int]],
    inf_type: Tuple[int, int],
    finite_part=None,
    label: Optional[str] = None,
) -> HeckeCharacter:
    """Validate and build a Hecke character.

    Args:
        field: the base field
        f: conductor (ideal or generator)
        inf_type: (q, r)
        finite_part: None / "trivial", a list of (k, n) roots aligned with the
            computed generators, or a mapping generator -> (k, n)
        label: optional identifier used in reports

    Raises:
        MalformedSpec: wrong shape, inconsistent orders or imprimitive data
        UnitIncompatible: no Hecke character has this data
    """
    f = f if isinstance(f, PrincipalIdeal) else field.ideal(f)
    q, r = int(inf_type[0]), int(inf_type[1])
    group = residue_units(field, f)
    phases = _coerce_finite_part(group, finite_part)
    psi = HeckeCharacter(field, f, q, r, phases, group, label)
    _check_primitive(psi)
    _check_unit_compatibility(psi)
    log.debug("built character %s", psi.id)
    return psi


def _check_primitive(psi: HeckeCharacter) -> None:
    f = psi.conductor
    for prime, e in f.factorization:
        smaller = f.quotient(prime)
        kernel = [x for x in psi.group.elements if smaller.congruent(x, psi.field.element(1))]
        if all(psi.chi(x) == 0 for x in kernel):
            raise MalformedSpec(
                f"finite part factors through {smaller}; it is not primitive of conductor {f}",
                error_code="NOT_PRIMITIVE",
            )


def _check_unit_compatibility(psi: HeckeCharacter) -> None:
    w = psi.field.w
    for j, u in enumerate(psi.field.units):
        required = _unit_phase(Fraction(j * (psi.r - psi.q), w))
        if psi.chi(u) != required:
            raise UnitIncompatible(
                f"chi({u!r}) * u^{psi.q} * conj(u)^{psi.r} != 1: no Hecke character of conductor "
                f"{psi.conductor} and infinity type ({psi.q},{psi.r}) has this finite part"
            )


def character_from_values(
    field: ImagQuadField,
    f: Union[PrincipalIdeal, FieldElement, int, Tuple[int, int]],
    inf_type: Tuple[int, int],
    values: Mapping,
    label: Optional[str] = None,
) -> HeckeCharacter:
    """The unique character of conductor f and type (q, r) with chi(x) = e(k/n) on the given x.

    ``values`` maps residues (elements or (a, b) pairs) to roots (k, n); unlike
    ``make_character`` the residues need not be the computed generators.

    Raises:
        MalformedSpec: no character, or more than one, matches the values
    """
    f = f if isinstance(f, PrincipalIdeal) else field.ideal(f)
    wanted = []
    for x, (k, n) in values.items():
        x = x if isinstance(x, FieldElement) else field(tuple(x))
        if n <= 0:
            raise MalformedSpec(f"root of unity ({k},{n}) has a non-positive order")
        wanted.append((x, _unit_phase(Fraction(k, n))))
    matches = [psi for psi in enumerate_characters(field, f, inf_type)
               if all(psi.chi(x) == phase for x, phase in wanted)]
    if len(matches) != 1:
        raise MalformedSpec(
            f"{len(matches)} primitive characters of conductor {f} and type {tuple(inf_type)} "
            f"take the values {[(repr(x), str(ph)) for x, ph in wanted]}; exactly one is needed"
        )
    psi = matches[0]
    if label:
        psi = HeckeCharacter(psi.field, psi.conductor, psi.q, psi.r, psi.phases, psi.group, label)
    return psi


def enumerate_characters(
    field: ImagQuadField,
    f: Union[PrincipalIdeal, FieldElement, int],
    inf_type: Tuple[int, int],
) -> Iterator[HeckeCharacter]:
    """All primitive characters of conductor f and the given infinity type."""
    f = f if isinstance(f, PrincipalIdeal) else field.ideal(f)
    group = residue_units(field, f)
    for exps in itertools.product(*(range(n) for n in group.orders)):
        spec = [(e, n) for e, n in zip(exps, group.orders)]
        try:
            yield make_character(field, f, inf_type, spec)
        except (MalformedSpec, UnitIncompatible):
            continue


# ─── Values ─────────────────────────────────────────────────────────────────

def value_on_ideal(psi: HeckeCharacter, m: Union[PrincipalIdeal, FieldElement]) -> CharacterValue:
    """psi(m) on the canonical generator; exact zero off the coprime ideals."""
    m = m if isinstance(m, PrincipalIdeal) else psi.field.ideal(m)
    phase = psi.chi(m.gen)
    if phase is None:
        return CharacterValue.zero_value()
    return CharacterValue(phase=phase) * psi.infinity_value(m.gen)


def gauss_sum(psi: HeckeCharacter, prec: int, generator: Optional[FieldElement] = None) -> mpmath.mpc:
    """sum_b chi(b) exp(2 pi i Tr(b/(f delta))) over (O_K/f)^x; 1 for f = (1).

    ``generator`` replaces the canonical generator of f; a unit multiple u*f
    scales the sum by chi(u).
    """
    f = psi.conductor
    if f.is_unit_ideal():
        return mpmath.mpc(1)
    gen = f.gen if generator is None else generator
    if psi.field.ideal(gen) != f:
        raise InputError(f"{gen!r} does not generate the conductor {f}")
    f_delta = gen * psi.field.delta
    with mpmath.workdps(prec + 10):
        total = mpmath.mpc(0)
        for b in psi.group.elements:
            angle = psi.chi(b) + psi.field.trace_ratio(b, f_delta)
            total += mpmath.expjpi(2 * mpmath.mpf(angle.numerator) / angle.denominator)
    return +total


def normalized_gauss_sum(psi: HeckeCharacter, prec: int) -> mpmath.mpc:
    """tau(psi) = psi_infinity(f delta)^{-1} * g(chi^{-1}).

    With this normalisation tau(psi^{-1}) = psi_infinity(f delta) g(chi) and
    tau(psi |.|^{-k}) = (f delta)^{k-q} conj(f delta)^{k-r} g(conj chi).
    """
    f_delta = psi.conductor.gen * psi.field.delta
    inverse_infinity = psi.infinity_value(f_delta).inverse().to_complex(prec + 10)
    with mpmath.workdps(prec + 10):
        value = inverse_infinity * gauss_sum(inverse_character(psi, finite_only=True), prec)
    return +value


# ─── Derived characters ─────────────────────────────────────────────────────

def inverse_character(psi: HeckeCharacter, finite_only: bool = False) -> HeckeCharacter:
    """psi^{-1}: finite part chi^{-1}, infinity type (-q, -r).

    With ``finite_only`` the infinity type is kept, which is only meaningful
    as a carrier for the finite part (e.g. inside Gauss sums).
    """
    q, r = (psi.q, psi.r) if finite_only else (-psi.q, -psi.r)
    phases = tuple(_unit_phase(-p) for p in psi.phases)
    return HeckeCharacter(psi.field, psi.conductor, q, r, phases, psi.group, None)


def twist_by_norm(psi: HeckeCharacter, j: int) -> HeckeCharacter:
    """psi * N(.)^j on ideals; infinity type shifts to (q + j, r + j)."""
    return HeckeCharacter(psi.field, psi.conductor, psi.q + j, psi.r + j, psi.phases, psi.group, None)


def dual_character(psi: HeckeCharacter, k: int) -> HeckeCharacter:
    """psi^{-1} |.|^k: conductor f, finite part chi^{-1}, type (k - q, k - r)."""
    dual = twist_by_norm(inverse_character(psi), k)
    if psi.label:
        dual = HeckeCharacter(dual.field, dual.conductor, dual.q, dual.r, dual.phases, dual.group, f"{psi.label}*")
    return dual


# ─── p-adic realisations ────────────────────────────────────────────────────

def _primes_above(field: ImagQuadField, p: int) -> Tuple[PrincipalIdeal, ...]:
    return splitting_type(field, p).primes


def p_fin_value(psi: HeckeCharacter, alpha: FieldElement, p: int) -> CharacterValue:
    """psi_(p)(alpha) * alpha^q * conj(alpha)^r for a conductor dividing p^infinity."""
    above = _primes_above(psi.field, p)
    for prime, _ in psi.conductor.factorization:
        if prime not in above:
            raise ConductorNotPPower(f"conductor {psi.conductor} is not supported above {p}")
    if alpha.is_zero() or alpha.norm() % p == 0:
        raise AlphaNotCoprime(f"{alpha!r} is not coprime to {p}")
    return psi.finite_value(alpha) * psi.infinity_value(alpha)


@dataclass(frozen=True)
class IdeleAtP:
    """The components (x_P) of an idele at the primes above p."""

    p: int
    components: Tuple[FieldElement, ...]

    @classmethod
    def diagonal(cls, field: ImagQuadField, p: int, alpha: FieldElement) -> "IdeleAtP":
        n = len(_primes_above(field, p))
        return cls(p, tuple(alpha for _ in range(n)))


def sigma_p(
    field: ImagQuadField,
    p: int,
    inf_type: Tuple[int, int],
    x: Union[FieldElement, IdeleAtP],
) -> CharacterValue:
    """sigma_p^{q,r}: x_P^q conj(x_Pbar)^r if p splits, x^q conj(x)^r otherwise."""
    q, r = inf_type
    split = splitting_type(field, p)
    if isinstance(x, FieldElement):
        x = IdeleAtP.diagonal(field, p, x)
    _check_components(split.primes, x)
    if split.kind is SplittingKind.SPLIT:
        x_p, x_pbar = x.components
        return CharacterValue(factors=_merge([(x_p, q, 0), (x_pbar, 0, r)]))
    (x_p,) = x.components
    return CharacterValue(factors=_merge([(x_p, q, r)]))


def _check_components(primes: Sequence[PrincipalIdeal], x: IdeleAtP) -> None:
    if len(x.components) != len(primes):
        raise InputError(f"an idele at {x.p} needs {len(primes)} component(s), got {len(x.components)}")
    for prime, comp in zip(primes, x.components):
        if comp.is_zero() or prime.divides(comp):
            raise AlphaNotCoprime(f"{comp!r} is not a unit at {prime}")


def local_phase(psi: HeckeCharacter, prime: PrincipalIdeal, x: FieldElement) -> Fraction:
    """Phase of the local component chi_P(x) at a prime P of the conductor.

    chi_P(x) = chi(y) for the y with y = x mod P^e and y = 1 mod f / P^e.
    Primes not dividing f contribute nothing.
    """
    e = dict(psi.conductor.factorization).get(prime, 0)
    if e == 0:
        return Fraction(0)
    if prime.divides(x):
        raise AlphaNotCoprime(f"{x!r} is not a unit at {prime}")
    local = prime ** e
    rest = psi.conductor.quotient(local)
    one = psi.field.element(1)
    for y in psi.group.elements:
        if local.congruent(y, x) and rest.congruent(y, one):
            return psi.chi(y)
    raise AssertionError(f"no residue mod {psi.conductor} matches {x!r} at {prime}")


def p_fin_at_idele(psi: HeckeCharacter, x: IdeleAtP) -> CharacterValue:
    """psi_(p)-fin on an idele supported above p: prod_P chi_P(x_P) * sigma_p^{q,r}(x)."""
    above = _primes_above(psi.field, x.p)
    for prime, _ in psi.conductor.factorization:
        if prime not in above:
            raise ConductorNotPPower(f"conductor {psi.conductor} is not supported above {x.p}")
    _check_components(above, x)
    phase = sum((local_phase(psi, prime, comp) for prime, comp in zip(above, x.components)), Fraction(0))
    return CharacterValue(phase=_unit_phase(phase)) * sigma_p(psi.field, x.p, psi.inf_type, x)
