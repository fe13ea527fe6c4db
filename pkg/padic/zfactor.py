"""Euler-type interpolation factors Z_P.

With L(F, psi) = sum c(m) psi(m)^-1 N(m)^-1, stabilising at P multiplies the
L-value by 1 - phi(P) / alpha_P where phi = psi^-1 |.|^k is the dual
character, so

    Lambda(F^alpha, psi) = Z_P(alpha, dual(psi)) * Lambda(F, psi)

with Z_P(alpha, phi) = 1 - phi(P) / alpha when P does not divide the conductor
of phi, and 1 otherwise.
"""
import logging
from typing import Iterable, Optional

import sympy

from hecke_chars import HeckeCharacter, value_on_ideal
from padic.hecke_roots import HeckeRoot
from quadfield import PrincipalIdeal

log = logging.getLogger(__name__)


def z_factor(root: HeckeRoot, phi: HeckeCharacter, prime: PrincipalIdeal) -> sympy.Expr:
    """1 - phi(P) / alpha_P, or 1 when P divides the conductor of phi."""
    if prime.divides(phi.conductor.gen):
        return sympy.Integer(1)
    value = value_on_ideal(phi, prime).to_sympy()
    return 1 - value / root.exact


def z_product(form, phi: HeckeCharacter, primes: Optional[Iterable[PrincipalIdeal]] = None) -> sympy.Expr:
    """prod over the stabilised primes of Z_P(alpha_P, phi)."""
    primes = form.primes if primes is None else primes
    total = sympy.Integer(1)
    for prime in primes:
        total *= z_factor(form.alpha(prime), phi, prime)
    return total
