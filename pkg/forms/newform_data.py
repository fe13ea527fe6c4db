"""Classical newform data: prime coefficients, Atkin-Lehner signs, generators.

A newform record lists a_ell for primes ell up to a bound B. It may also carry
a ``source`` that regenerates the coefficients: an eta product
prod eta(d z)^e_d, or a Weierstrass model [a1, a2, a3, a4, a6].
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy import factorint, primerange
from sympy.ntheory import legendre_symbol

from errors import InsufficientCoefficients, MissingRootNumber, ParseError

log = logging.getLogger(__name__)


@dataclass
class ClassicalNewformData:
    """A weight k+2 newform on Gamma_0(N) with rational coefficients."""

    label: str
    level: int
    weight: int
    coefficients: Dict[int, int]
    atkin_lehner: Dict[int, int] = field(default_factory=dict)
    bound: int = 0
    source: Optional[Dict] = None

    def __post_init__(self):
        if not self.bound:
            self.bound = max(self.coefficients, default=1)

    @property
    def k(self) -> int:
        return self.weight - 2

    def a(self, ell: int) -> int:
        """a_ell for a prime ell."""
        try:
            return self.coefficients[ell]
        except KeyError:
            raise InsufficientCoefficients(
                f"{self.label}: a_{ell} is not available (coefficients known up to {self.bound})",
                prime=ell,
            ) from None

    def missing_primes(self, bound: int) -> List[int]:
        return [ell for ell in primerange(2, bound + 1) if ell not in self.coefficients]

    def require(self, bound: int):
        """Raise InsufficientCoefficients naming the first prime <= bound without a_ell."""
        missing = self.missing_primes(bound)
        if missing:
            raise InsufficientCoefficients(
                f"{self.label}: a_{missing[0]} missing (coefficients requested up to {bound})",
                prime=missing[0],
            )

    def an(self, n: int) -> int:
        """a_n by multiplicativity and the Hecke recursion."""
        result = 1
        for ell, e in factorint(n).items():
            result *= self._prime_power(ell, e)
        return result

    def an_list(self, n_max: int) -> List[int]:
        """[a_1, ..., a_n_max]."""
        self.require(n_max)
        return [self.an(n) for n in range(1, n_max + 1)]

    def _prime_power(self, ell: int, e: int) -> int:
        a = self.a(ell)
        if self.level % ell == 0:
            return a ** e
        prev, cur = 1, a
        for _ in range(e - 1):
            prev, cur = cur, a * cur - ell ** (self.k + 1) * prev
        return cur if e else 1

    # ─── Root numbers ───────────────────────────────────────────────────────

    def atkin_lehner_sign(self, ell: int) -> int:
        if ell in self.atkin_lehner:
            return self.atkin_lehner[ell]
        if self.level % (ell * ell) and ell in self.coefficients:
            # ell || N: a_ell = -ell^(k/2) w_ell
            a = self.coefficients[ell]
            scale = ell ** (self.k // 2) if self.k % 2 == 0 else None
            if scale and a in (scale, -scale):
                return -a // scale
        raise MissingRootNumber(f"{self.label}: no Atkin-Lehner sign at {ell}")

    def root_number(self) -> int:
        """epsilon_f = (-1)^((k+2)/2) * prod_{ell | N} w_ell."""
        if self.weight % 2:
            raise MissingRootNumber(f"{self.label}: odd weight has no Gamma_0 root number")
        sign = (-1) ** (self.weight // 2)
        for ell in factorint(self.level):
            sign *= self.atkin_lehner_sign(ell)
        return sign

    def has_atkin_lehner(self) -> bool:
        try:
            self.root_number()
        except MissingRootNumber:
            return False
        return True

    def to_record(self) -> Dict:
        """JSON-ready dictionary (the persisted newform record)."""
        record = {
            "label": self.label,
            "level": self.level,
            "weight": self.weight,
            "bound": self.bound,
            "coefficients": [[ell, self.coefficients[ell]] for ell in sorted(self.coefficients)],
            "atkin_lehner": [[ell, s] for ell, s in sorted(self.atkin_lehner.items())],
        }
        if self.source:
            record["source"] = self.source
        return record


# ─── Coefficient sources ────────────────────────────────────────────────────

def _euler_product_series(n_max: int) -> List[int]:
    """Coefficients of prod_{n >= 1} (1 - q^n) up to q^n_max (pentagonal numbers)."""
    series = [0] * (n_max + 1)
    k = 0
    while True:
        done = True
        for j in ((k, -k) if k else (0,)):
            g = j * (3 * j - 1) // 2
            if g <= n_max:
                series[g] += -1 if j % 2 else 1
                done = False
        if done and k:
            break
        k += 1
    return series


def _multiply(a: List[int], b: List[int], n_max: int) -> List[int]:
    out = [0] * (n_max + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(0, n_max + 1 - i):
            if b[j]:
                out[i + j] += x * b[j]
    return out


def eta_product_coefficients(factors: List[Tuple[int, int]], n_max: int) -> List[int]:
    """[a_1, ..., a_n_max] of prod eta(d z)^e, which must start at q^1."""
    shift = sum(d * e for d, e in factors)
    if shift != 24:
        raise ParseError(f"eta product {factors} does not have leading term q^1")
    base = _euler_product_series(n_max)
    series = [1] + [0] * n_max
    for d, e in factors:
        if e < 0:
            raise ParseError("eta products with negative exponents are not supported")
        scaled = [0] * (n_max + 1)
        for i, c in enumerate(base):
            if i * d <= n_max:
                scaled[i * d] = c
        for _ in range(e):
            series = _multiply(series, scaled, n_max)
    # a_n is the coefficient of q^n = q * q^(n-1)
    return series[: n_max]


def weierstrass_ap(model: List[int], ell: int) -> int:
    """a_ell = ell + 1 - #E(F_ell), counting the singular point at bad primes."""
    a1, a2, a3, a4, a6 = model
    affine = 0
    if ell == 2:
        for x in range(2):
            for y in range(2):
                lhs = y * y + a1 * x * y + a3 * y
                rhs = x ** 3 + a2 * x * x + a4 * x + a6
                affine += (lhs - rhs) % 2 == 0
    else:
        for x in range(ell):
            # (2y + a1 x + a3)^2 = 4(x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2
            rhs = (4 * (x ** 3 + a2 * x * x + a4 * x + a6) + (a1 * x + a3) ** 2) % ell
            affine += 1 if rhs == 0 else 1 + legendre_symbol(rhs, ell)
    return ell + 1 - (affine + 1)


def generate_coefficients(source: Dict, bound: int) -> Dict[int, int]:
    """Prime coefficients a_ell for ell <= bound from a source block."""
    if "eta_product" in source:
        factors = [(int(d), int(e)) for d, e in source["eta_product"]]
        series = eta_product_coefficients(factors, bound)
        return {ell: series[ell - 1] for ell in primerange(2, bound + 1)}
    if "weierstrass" in source:
        model = [int(x) for x in source["weierstrass"]]
        if len(model) != 5:
            raise ParseError("a Weierstrass model needs [a1, a2, a3, a4, a6]")
        return {ell: weierstrass_ap(model, ell) for ell in primerange(2, bound + 1)}
    raise ParseError(f"unknown coefficient source {sorted(source)}")


def ramanujan_violations(data: ClassicalNewformData) -> List[int]:
    """Primes where |a_ell| > 2 ell^((k+1)/2)."""
    bad = []
    for ell, a in sorted(data.coefficients.items()):
        if a * a > 4 * ell ** (data.k + 1):
            bad.append(ell)
    return bad

