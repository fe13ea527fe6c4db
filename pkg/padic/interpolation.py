"""Interpolation data of the p-adic L-function and the p-adic functional equation.

A character psi of conductor dividing p^oo is sent to

    L_p(F_p, psi) = Z(psi) * [D w tau(psi^-1) / ((-1)^(k+q+r) 2 lambda_f Omega)] * Lambda(F_p, psi)

The period Omega and the scalar lambda_f stay symbolic. The functional
equation

    L_p(F_p, psi) = -eps(n) N(n)^(k/2) psi_pfin(x_{-nu,p})^-1 L_p(F_p, dual psi)

is checked through this decomposition. Both brackets are divided
symbolically so that Omega and lambda_f cancel before anything is evaluated.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import mpmath
import sympy

import config
from errors import ConductorNotPPower, FrickeSignUnknown, InputError, WildConductorUnsupported
from forms.stabilised import StabilisedForm, slope_class
from hecke_chars import (
    HeckeCharacter,
    IdeleAtP,
    dual_character,
    inverse_character,
    normalized_gauss_sum,
    p_fin_at_idele,
    p_fin_value,
    sympy_to_mpc,
)
from lfun.lvalues import compare_sides, epsilon_factor, lambda_value, relative_tolerance
from lfun.theta import default_split_point, level_generator
from padic.zfactor import z_product
from quadfield import PrincipalIdeal, prime_below
from reports import FEReport

log = logging.getLogger(__name__)

OMEGA = sympy.Symbol("Omega_F")
LAMBDA_F = sympy.Symbol("lambda_f")


@dataclass(frozen=True)
class InterpolationConstant:
    """Z(psi) and the Gauss-sum bracket of the interpolation formula at psi."""

    character: str
    z_product: sympy.Expr
    gauss_prefactor: sympy.Expr
    tau_symbol: sympy.Symbol
    tau_value: mpmath.mpc
    admissibility: Tuple[Fraction, ...]

    def numeric_z(self, prec: int) -> mpmath.mpc:
        return sympy_to_mpc(self.z_product, prec)


def admissibility_data(form: StabilisedForm) -> Dict[PrincipalIdeal, Fraction]:
    """h_P = v_p(alpha_P) for every stabilised prime."""
    return {P: form.alpha(P).valuation for P in form.primes}


def _gauss_bracket(form: StabilisedForm, tau: sympy.Symbol, q: int, r: int) -> sympy.Expr:
    field = form.field
    sign = (-1) ** (form.k + q + r)
    return field.D * field.w * tau / (sign * 2 * LAMBDA_F * OMEGA)


def interpolation_constant(form: StabilisedForm, psi: HeckeCharacter, prec: Optional[int] = None,
                           tau_name: str = "tau") -> InterpolationConstant:
    """The factors multiplying Lambda(F_p, psi) in L_p(F_p, psi)."""
    prec = prec or config.DEFAULT_PRECISION
    tau_value = normalized_gauss_sum(inverse_character(psi), prec)
    tau = sympy.Symbol(tau_name)
    admissibility = tuple(admissibility_data(form).values())
    return InterpolationConstant(
        psi.id,
        z_product(form, psi),
        _gauss_bracket(form, tau, psi.q, psi.r),
        tau,
        tau_value,
        admissibility,
    )


def _check_conductor(psi: HeckeCharacter, p: int) -> None:
    for prime, e in psi.conductor.factorization:
        if prime_below(prime) != p:
            raise ConductorNotPPower(f"conductor {psi.conductor} of {psi.id} has a prime above {prime_below(prime)}")
        if e > 1:
            raise WildConductorUnsupported(
                f"conductor {psi.conductor} of {psi.id} is wildly ramified at {prime}; only tame conductors are supported"
            )


def padic_fe_check(form: StabilisedForm, psi: HeckeCharacter, prec: Optional[int] = None, split_point=None,
                   flip_sign: bool = False, tolerance=None) -> FEReport:
    """
    The p-adic functional equation at psi through its complex decomposition.

    Args:
        form: F stabilised at every prime above p
        psi: a character of tame conductor dividing p^oo
        flip_sign: negate eps(n) (negative control; residual ~ 2)

    Raises:
        ConductorNotPPower: the conductor has a prime not above p
        WildConductorUnsupported: the conductor is divisible by P^2
        FrickeSignUnknown: eps(n) of the base form is unknown
    """
    if not isinstance(form, StabilisedForm):
        raise InputError(f"{form.label} is not p-stabilised")
    prec = prec or config.DEFAULT_PRECISION
    p = form.p
    _check_conductor(psi, p)
    base = form.base
    if base.fricke_sign is None:
        raise FrickeSignUnknown(f"{base.label}: epsilon(n) is unknown")
    k, (q, r) = form.k, psi.inf_type
    dual = dual_character(psi, k)
    nu = level_generator(base)
    dps = prec + config.GUARD_DIGITS

    lhs_const = interpolation_constant(form, psi, prec, "tau_psi")
    rhs_const = interpolation_constant(form, dual, prec, "tau_dual")
    bracket_ratio = sympy.simplify(lhs_const.gauss_prefactor / rhs_const.gauss_prefactor)
    period_cancels = not ({OMEGA, LAMBDA_F} & bracket_ratio.free_symbols)
    if not period_cancels:
        raise InputError(f"the period does not cancel in {bracket_ratio}")

    # psi_f(-nu) psi_inf(-nu) = psi_pfin(x_{-nu,p}): global value against the product of local components
    minus_nu = -nu
    at_idele = p_fin_at_idele(psi, IdeleAtP.diagonal(form.field, p, minus_nu))
    global_value = p_fin_value(psi, minus_nu, p)
    with mpmath.workdps(dps):
        idele_value = at_idele.to_complex(dps)
        idele_identity = abs(idele_value - global_value.to_complex(dps)) <= relative_tolerance(prec) * abs(idele_value)

    eps = epsilon_factor(form, psi, prec)
    sign = -eps.sign if flip_sign else eps.sign
    with mpmath.workdps(dps):
        if split_point is None:
            split_point = default_split_point(base, psi, prec) * mpmath.mpf(config.SPLIT_RATIO)
        lhs = lambda_value(form, psi, prec, split_point)
        rhs = lambda_value(form, dual, prec, split_point)

        evaluate = sympy.lambdify((lhs_const.tau_symbol, rhs_const.tau_symbol), bracket_ratio, "mpmath")
        ratio = mpmath.mpc(evaluate(lhs_const.tau_value, rhs_const.tau_value))
        constant = -sign * mpmath.sqrt(nu.norm()) ** k / idele_value
        lhs_factor = lhs_const.numeric_z(dps) * ratio
        rhs_factor = rhs_const.numeric_z(dps)
        residual, absolute = compare_sides(lhs, rhs, constant, lhs_factor, rhs_factor, prec)

        # the same constant read off the complex one: K tau(psi^-1) / tau(psi |.|^-k)
        via_complex = (-eps.value if flip_sign else eps.value) * ratio
        formulations_agree = abs(via_complex - constant) <= relative_tolerance(prec) * abs(constant)
        # |psi_f| = 1 and |sigma^{q,r}(-nu)| = N(nu)^((q+r)/2), so both routes have size N(nu)^((k-q-r)/2)
        expected = mpmath.sqrt(nu.norm()) ** (k - q - r)
        magnitude_ok = all(
            abs(abs(c) - expected) <= relative_tolerance(prec) * expected for c in (constant, via_complex)
        )

    tolerance = relative_tolerance(prec) if tolerance is None else mpmath.mpf(tolerance)
    report = FEReport(lhs, rhs, constant, residual, tolerance, lhs_factor, rhs_factor, absolute, "padic")
    report.extra.update(
        {
            "p": p,
            "flipped_sign": flip_sign,
            "period_cancels": period_cancels,
            "idele_identity": bool(idele_identity),
            "constant_formulations_agree": bool(formulations_agree),
            "constant_magnitude_ok": bool(magnitude_ok),
            "slope_class": slope_class(form).kind.value,
            "admissibility": [str(h) for h in lhs_const.admissibility],
        }
    )
    log.info("p-adic FE %s %s: residual %s (%s)", form.label, psi.id, mpmath.nstr(residual, 5), report.verdict)
    return report
