"""Exact arithmetic in the class-number-one imaginary quadratic fields.

Elements are pairs (a, b) meaning a + b*omega, where omega is the standard
Z-basis element of the ring of integers. Ideals are principal and stored by a
canonical generator: the associate whose argument lies in [0, 2*pi/w).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Tuple, Union

import mpmath
from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import kronecker_symbol as _kronecker

from errors import InputError, NotPrime

log = logging.getLogger(__name__)

SUPPORTED_D = (-1, -2, -3, -7, -11, -19, -43, -67, -163)


class SplittingKind(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


@dataclass(frozen=True)
class ImagQuadField:
    """Q(sqrt(d)) for one of the nine class-number-one values of d."""

    d: int

    def __post_init__(self):
        if self.d not in SUPPORTED_D:
            raise InputError(
                f"Q(sqrt({self.d})) is not a supported field; class number one requires d in {SUPPORTED_D}",
                error_code="UNSUPPORTED_FIELD",
            )

    # ─── Invariants ─────────────────────────────────────────────────────────

    @property
    def trace_omega(self) -> int:
        return 1 if self.d % 4 == 1 else 0

    @property
    def norm_omega(self) -> int:
        return (1 - self.d) // 4 if self.d % 4 == 1 else -self.d

    @property
    def disc(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def D(self) -> int:
        """|disc|."""
        return -self.disc

    @property
    def w(self) -> int:
        return {-1: 4, -3: 6}.get(self.d, 2)

    @property
    def omega(self) -> "FieldElement":
        return FieldElement(self, 0, 1)

    @property
    def delta(self) -> "FieldElement":
        """Square root of disc in the upper half-plane; generates the different."""
        if self.d % 4 == 1:
            return FieldElement(self, -1, 2)
        return FieldElement(self, 0, 2)

    def __str__(self) -> str:
        return f"Q(sqrt({self.d}))"

    # ─── Elements ───────────────────────────────────────────────────────────

    def element(self, a: int, b: int = 0) -> "FieldElement":
        return FieldElement(self, int(a), int(b))

    def __call__(self, x: Union[int, Tuple[int, int], "FieldElement"]) -> "FieldElement":
        if isinstance(x, FieldElement):
            return x
        if isinstance(x, tuple):
            return FieldElement(self, int(x[0]), int(x[1]))
        return FieldElement(self, int(x), 0)

    @cached_property
    def units(self) -> Tuple["FieldElement", ...]:
        """Units ordered as u_j = exp(2*pi*i*j/w)."""
        if self.w == 4:
            coords = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        elif self.w == 6:
            coords = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
        else:
            coords = [(1, 0), (-1, 0)]
        return tuple(FieldElement(self, a, b) for a, b in coords)

    def unit_index(self, u: "FieldElement") -> int:
        """Exponent j with u = exp(2*pi*i*j/w)."""
        for j, v in enumerate(self.units):
            if v == u:
                return j
        raise InputError(f"{u} is not a unit of {self}", error_code="NON_UNIT")

    def is_canonical(self, x: "FieldElement") -> bool:
        if self.w == 2:
            return x.b > 0 or (x.b == 0 and x.a > 0)
        return x.a > 0 and x.b >= 0

    def canonical(self, x: "FieldElement") -> "FieldElement":
        if x.is_zero():
            return x
        for u in self.units:
            y = u * x
            if self.is_canonical(y):
                return y
        raise AssertionError(f"no canonical associate for {x}")

    # ─── Ideals ─────────────────────────────────────────────────────────────

    def ideal(self, x: Union[int, Tuple[int, int], "FieldElement"]) -> "PrincipalIdeal":
        x = self(x)
        if x.is_zero():
            raise InputError("the zero ideal is not allowed here", error_code="ZERO_IDEAL")
        return PrincipalIdeal(self.canonical(x))

    @property
    def unit_ideal(self) -> "PrincipalIdeal":
        return PrincipalIdeal(self.element(1))

    def embed(self, x: "FieldElement", prec: int) -> mpmath.mpc:
        return embed(x, prec)

    def kronecker(self, n: int) -> int:
        """The quadratic character chi_disc evaluated at the integer n."""
        return kronecker_symbol(self.disc, n)

    def trace_ratio(self, x: "FieldElement", y: "FieldElement") -> Fraction:
        """Tr(x/y) as an exact rational."""
        num = x * y.conj()
        return Fraction(num.trace(), y.norm())


@dataclass(frozen=True)
class FieldElement:
    """a + b*omega with exact integer coordinates."""

    field: ImagQuadField = dc_field(repr=False)
    a: int
    b: int

    def __repr__(self) -> str:
        if self.b == 0:
            return str(self.a)
        name = "i" if self.field.d == -1 else "w"
        if self.a == 0:
            return f"{self.b}{name}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}{name}"

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise InputError("elements of different fields", error_code="FIELD_MISMATCH")
            return other
        if isinstance(other, int):
            return FieldElement(self.field, other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t, n = self.field.trace_omega, self.field.norm_omega
        be = self.b * other.b
        return FieldElement(
            self.field,
            self.a * other.a - be * n,
            self.a * other.b + self.b * other.a + be * t,
        )

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise InputError("negative powers of field elements are not integral")
        result = FieldElement(self.field, 1, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self) -> "FieldElement":
        return FieldElement(self.field, self.a + self.b * self.field.trace_omega, -self.b)

    def norm(self) -> int:
        t, n = self.field.trace_omega, self.field.norm_omega
        return self.a * self.a + self.a * self.b * t + self.b * self.b * n

    def trace(self) -> int:
        return 2 * self.a + self.b * self.field.trace_omega

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def divides(self, other: "FieldElement") -> bool:
        return self.exact_div(other) is not None

    def exact_div(self, other: "FieldElement"):
        """other / self if integral, else None."""
        n = self.norm()
        if n == 0:
            return None
        num = other * self.conj()
        if num.a % n or num.b % n:
            return None
        return FieldElement(self.field, num.a // n, num.b // n)

    def __floordiv__(self, other: "FieldElement") -> "FieldElement":
        q = other.exact_div(self)
        if q is None:
            raise InputError(f"{other} does not divide {self}")
        return q


def embed(x: FieldElement, prec: int) -> mpmath.mpc:
    """Complex embedding with sqrt(d) in the upper half-plane."""
    with mpmath.workdps(prec):
        root = mpmath.sqrt(-x.field.d)
        if x.field.d % 4 == 1:
            re = mpmath.mpf(2 * x.a + x.b) / 2
            im = x.b * root / 2
        else:
            re = mpmath.mpf(x.a)
            im = x.b * root
        return mpmath.mpc(re, im)


# ─── Cusps ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Cusp:
    """The cusp b/f of K."""

    numerator: FieldElement
    denominator: FieldElement

    @classmethod
    def zero(cls, field: ImagQuadField) -> "Cusp":
        return cls(field.element(0), field.element(1))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def value(self, prec: int) -> mpmath.mpc:
        with mpmath.workdps(prec):
            return embed(self.numerator, prec) / embed(self.denominator, prec)


# ─── Principal ideals ───────────────────────────────────────────────────────

@dataclass(frozen=True)
class PrincipalIdeal:
    """An integral ideal stored by its canonical generator."""

    gen: FieldElement

    @property
    def field(self) -> ImagQuadField:
        return self.gen.field

    @cached_property
    def norm(self) -> int:
        return abs(self.gen.norm())

    def __repr__(self) -> str:
        return f"({self.gen!r})"

    def __mul__(self, other: "PrincipalIdeal") -> "PrincipalIdeal":
        return self.field.ideal(self.gen * other.gen)

    def __pow__(self, e: int) -> "PrincipalIdeal":
        return self.field.ideal(self.gen ** e)

    def conj(self) -> "PrincipalIdeal":
        return self.field.ideal(self.gen.conj())

    def divides(self, other: Union["PrincipalIdeal", FieldElement]) -> bool:
        target = other.gen if isinstance(other, PrincipalIdeal) else other
        return self.gen.divides(target)

    def quotient(self, other: "PrincipalIdeal") -> "PrincipalIdeal":
        """self / other, which must be integral."""
        q = other.gen.exact_div(self.gen)
        if q is None:
            raise InputError(f"{other} does not divide {self}")
        return self.field.ideal(q)

    def is_unit_ideal(self) -> bool:
        return self.norm == 1

    @cached_property
    def factorization(self) -> Tuple[Tuple["PrincipalIdeal", int], ...]:
        """Prime ideal factorization, sorted by (norm, generator)."""
        factors: List[Tuple[PrincipalIdeal, int]] = []
        x = self.gen
        for ell in sorted(factorint(self.norm)):
            for prime in splitting_type(self.field, ell).primes:
                e = 0
                while True:
                    q = prime.gen.exact_div(x)
                    if q is None:
                        break
                    x, e = q, e + 1
                if e:
                    factors.append((prime, e))
        return tuple(factors)

    def coprime_to(self, other: "PrincipalIdeal") -> bool:
        return all(not p.divides(other.gen) for p, _ in self.factorization)

    def euler_phi(self) -> int:
        result = 1
        for prime, e in self.factorization:
            result *= prime.norm ** (e - 1) * (prime.norm - 1)
        return result

    # ─── Residues ───────────────────────────────────────────────────────────

    @cached_property
    def hnf(self) -> Tuple[int, int, int]:
        """(n1, m, n2): the lattice is spanned by (n1, 0) and (m, n2)."""
        g = self.gen
        t, n = self.field.trace_omega, self.field.norm_omega
        u = (g.a, g.b)
        v = (-g.b * n, g.a + g.b * t)
        while v[1] != 0:
            q = u[1] // v[1]
            u, v = v, (u[0] - q * v[0], u[1] - q * v[1])
        if u[1] < 0:
            u = (-u[0], -u[1])
        n2 = u[1]
        n1 = abs(v[0])
        return n1, u[0] % n1, n2

    def reduce(self, x: FieldElement) -> FieldElement:
        """Representative of x mod self in the box [0, n1) x [0, n2)."""
        n1, m, n2 = self.hnf
        qb = x.b // n2
        a = x.a - qb * m
        return FieldElement(self.field, a % n1, x.b - qb * n2)

    def congruent(self, x: FieldElement, y: FieldElement) -> bool:
        return self.reduce(x - y).is_zero()

    def residues(self) -> Iterator[FieldElement]:
        n1, _, n2 = self.hnf
        for b in range(n2):
            for a in range(n1):
                yield FieldElement(self.field, a, b)


# ─── Splitting of rational primes ───────────────────────────────────────────

@dataclass(frozen=True)
class Splitting:
    """The primes of K above a rational prime ell."""

    ell: int
    kind: SplittingKind
    primes: Tuple[PrincipalIdeal, ...]

    @property
    def residue_degree(self) -> int:
        return 2 if self.kind is SplittingKind.INERT else 1

    @property
    def ramification_index(self) -> int:
        return 2 if self.kind is SplittingKind.RAMIFIED else 1


def kronecker_symbol(disc: int, n: int) -> int:
    """Kronecker symbol (disc/n); (disc/-1) is the sign of disc."""
    return int(_kronecker(disc, n))


def _element_of_norm(field: ImagQuadField, target: int) -> FieldElement:
    t, n = field.trace_omega, field.norm_omega
    b = 0
    # norm = (a + b*t/2)^2 + b^2*D/4
    while b * b * field.D <= 4 * target:
        disc = b * b * t * t - 4 * (b * b * n - target)
        if disc >= 0:
            root = math.isqrt(disc)
            if root * root == disc:
                for sign in (1, -1):
                    twice_a = -b * t + sign * root
                    if twice_a % 2 == 0:
                        return FieldElement(field, twice_a // 2, b)
        b += 1
    raise AssertionError(f"no element of norm {target} in {field}")


@lru_cache(maxsize=None)
def splitting_type(field: ImagQuadField, ell: int) -> Splitting:
    """Decompose the rational prime ell in K."""
    if not isprime(ell):
        raise NotPrime(f"{ell} is not prime")
    chi = kronecker_symbol(field.disc, ell)
    if chi == 0:
        pi = field.ideal(_element_of_norm(field, ell))
        return Splitting(ell, SplittingKind.RAMIFIED, (pi,))
    if chi == -1:
        return Splitting(ell, SplittingKind.INERT, (field.ideal(ell),))
    pi = field.ideal(_element_of_norm(field, ell))
    primes = sorted((pi, pi.conj()), key=lambda p: (p.gen.b, p.gen.a))
    return Splitting(ell, SplittingKind.SPLIT, tuple(primes))


def prime_below(prime: PrincipalIdeal) -> int:
    n = prime.norm
    return math.isqrt(n) if math.isqrt(n) ** 2 == n and not isprime(n) else n


# ─── Enumeration ────────────────────────────────────────────────────────────

def ideals_up_to_norm(field: ImagQuadField, X: int) -> List[PrincipalIdeal]:
    """Every nonzero integral ideal of norm <= X, once, sorted by norm."""
    if X < 1:
        return []
    t = field.trace_omega
    found = []
    b = 0
    while b * b * field.D <= 4 * X:
        # a ranges over (a + b*t/2)^2 <= X - b^2*D/4
        slack = X - (b * b * field.D) / 4
        half = math.isqrt(int(slack)) + 1
        centre = -b * t // 2
        for a in range(centre - half - 1, centre + half + 2):
            x = FieldElement(field, a, b)
            nx = x.norm()
            if 0 < nx <= X and field.is_canonical(x):
                found.append(x)
        b += 1
    found.sort(key=lambda x: (x.norm(), x.b, x.a))
    return [PrincipalIdeal(x) for x in found]


# ─── Residue unit groups ────────────────────────────────────────────────────

@dataclass(frozen=True)
class ResidueGroup:
    """(O_K/f)^x with an independent generating set."""

    modulus: PrincipalIdeal
    elements: Tuple[FieldElement, ...]
    generators: Tuple[FieldElement, ...]
    orders: Tuple[int, ...]
    logs: Dict[Tuple[int, int], Tuple[int, ...]] = dc_field(repr=False, compare=False, hash=False)

    def __len__(self) -> int:
        return len(self.elements)

    def discrete_log(self, x: FieldElement) -> Tuple[int, ...]:
        """Exponent vector of x against the generators."""
        r = self.modulus.reduce(x)
        try:
            return self.logs[(r.a, r.b)]
        except KeyError:
            raise InputError(f"{x} is not a unit modulo {self.modulus}", error_code="NOT_COPRIME") from None


def _order(x: FieldElement, f: PrincipalIdeal) -> int:
    one = f.reduce(x.field.element(1))
    y, k = f.reduce(x), 1
    while y != one:
        y, k = f.reduce(y * x), k + 1
    return k


def _span(gens: List[FieldElement], f: PrincipalIdeal) -> Dict[Tuple[int, int], FieldElement]:
    one = f.reduce(gens[0].field.element(1)) if gens else None
    span = {(one.a, one.b): one} if one is not None else {}
    frontier = list(span.values())
    while frontier:
        nxt = []
        for y in frontier:
            for g in gens:
                z = f.reduce(y * g)
                if (z.a, z.b) not in span:
                    span[(z.a, z.b)] = z
                    nxt.append(z)
        frontier = nxt
    return span


def residue_units(field: ImagQuadField, f: Union[PrincipalIdeal, FieldElement, int]) -> ResidueGroup:
    """(O_K/f)^x as representatives plus independent generators and orders."""
    if not isinstance(f, PrincipalIdeal):
        f = field.ideal(f)
    return _residue_units(f)


@lru_cache(maxsize=256)
def _residue_units(f: PrincipalIdeal) -> ResidueGroup:
    field = f.field
    primes = [p for p, _ in f.factorization]
    units = [x for x in f.residues() if all(not p.gen.divides(x) for p in primes)]
    size = len(units)
    assert size == f.euler_phi(), (size, f)

    generators: List[FieldElement] = []
    orders: List[int] = []
    # Greedy basis inside each Sylow subgroup
    for ell, e in (sorted(factorint(size).items()) if size > 1 else []):
        sylow_order = ell ** e
        sylow = [x for x in units if pow_mod(x, sylow_order, f) == f.reduce(field.element(1))]
        basis: List[FieldElement] = []
        span = _span([field.element(1)], f)
        while len(span) < sylow_order:
            best, best_q = None, 0
            for x in sylow:
                # order of x in the quotient by span
                y, k = f.reduce(x), 1
                while (y.a, y.b) not in span:
                    y, k = f.reduce(y * x), k + 1
                if k > best_q:
                    best, best_q = x, k
            # adjust inside the coset so the new generator meets span trivially
            chosen = None
            for h in span.values():
                cand = f.reduce(best * h)
                if _order(cand, f) == best_q:
                    chosen = cand
                    break
            assert chosen is not None, (f, best)
            basis.append(chosen)
            span = _span(basis, f)
        for g in basis:
            generators.append(g)
            orders.append(_order(g, f))

    logs: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    one = f.reduce(field.element(1))
    logs[(one.a, one.b)] = tuple(0 for _ in generators)
    for i, (g, n) in enumerate(zip(generators, orders)):
        current = dict(logs)
        for key, vec in current.items():
            y = FieldElement(field, *key)
            for e in range(1, n):
                y = f.reduce(y * g)
                v = list(vec)
                v[i] = e
                logs[(y.a, y.b)] = tuple(v)
    assert len(logs) == size
    log.debug("residue group mod %s: order %d, orders %s", f, size, orders)
    return ResidueGroup(f, tuple(units), tuple(generators), tuple(orders), logs)


def pow_mod(x: FieldElement, e: int, f: PrincipalIdeal) -> FieldElement:
    result = f.reduce(x.field.element(1))
    base = f.reduce(x)
    while e:
        if e & 1:
            result = f.reduce(result * base)
        base = f.reduce(base * base)
        e >>= 1
    return result
