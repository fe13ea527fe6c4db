"""Fourier-Whittaker components F_n(z, t) of a Bianchi form.

Coefficients are indexed by beta = alpha * delta (so c((beta)) is the ideal
coefficient), which turns the expansion into

    F_n(a, t) = t binom(2k+2, n) sum_{beta != 0} c((beta)) (-beta/|beta|)^(k+1-n)
                K_(n-k-1)(A |beta| t) e(Tr(beta a / delta))

with A = 4 pi / sqrt(D) and e(x) = exp(2 pi i x).
"""
import logging
from typing import Optional

import mpmath

import config
from errors import InputError, TFloorViolated
from lfun.bessel import bessel_k, cutoff_argument
from quadfield import Cusp, embed, ideals_up_to_norm

log = logging.getLogger(__name__)


def fourier_truncation(form, t, prec: int) -> int:
    """Norm bound past which the terms of F_n(., t) are below 10^-prec."""
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        A = 4 * mpmath.pi / mpmath.sqrt(form.field.D)
        x_cut = cutoff_argument(prec, form.k, 0, 0)
        return int(mpmath.floor((x_cut / (A * t)) ** 2)) + 1


def fourier_term(form, n: int, cusp: Cusp, t, prec: Optional[int] = None, norm_bound: Optional[int] = None) -> mpmath.mpc:
    """
    F_n(a, t) at the cusp a = b/f.

    Args:
        form: Bianchi form supplying c(m)
        n: component index, 0 <= n <= 2k+2
        cusp: the point a = numerator/denominator of K
        t: height, at least BIANCHI_T_FLOOR
        prec: decimal digits
        norm_bound: override the truncation (ideals of norm <= norm_bound)

    Raises:
        TFloorViolated: t is below the floor, or so small the truncation is out of budget
    """
    prec = prec or config.DEFAULT_PRECISION
    k = form.k
    if not 0 <= n <= 2 * k + 2:
        raise InputError(f"component index {n} is outside 0..{2 * k + 2}")
    if cusp.denominator.is_zero():
        raise InputError("cusp denominator must be nonzero")
    t = mpmath.mpf(t)
    if t < mpmath.mpf(config.T_FLOOR):
        raise TFloorViolated(f"t = {mpmath.nstr(t, 5)} is below the floor {config.T_FLOOR}")
    X = norm_bound if norm_bound is not None else fourier_truncation(form, t, prec)
    support = getattr(form, "support_norm", None)
    if support is not None:
        X = min(X, support)
    if X > config.MAX_THETA_NORM:
        raise TFloorViolated(
            f"t = {mpmath.nstr(t, 5)} needs ideals of norm up to {X} (budget {config.MAX_THETA_NORM})"
        )

    field = form.field
    exponent = k + 1 - n
    order = n - k - 1
    den_delta = cusp.denominator * field.delta
    dps = prec + config.GUARD_DIGITS
    with mpmath.workdps(dps):
        A = 4 * mpmath.pi / mpmath.sqrt(field.D)
        total = mpmath.mpc(0)
        terms = 0
        for ideal in ideals_up_to_norm(field, X):
            c = form.coefficient_complex(ideal, prec)
            if c == 0:
                continue
            bessel = bessel_k(order, A * mpmath.sqrt(ideal.norm) * t, prec)
            for u in field.units:
                beta = u * ideal.gen
                z = embed(beta, dps)
                phase = field.trace_ratio(beta * cusp.numerator, den_delta)
                additive = mpmath.expjpi(2 * mpmath.mpf(phase.numerator) / phase.denominator)
                total += c * (-z / abs(z)) ** exponent * bessel * additive
                terms += 1
        value = t * mpmath.binomial(2 * k + 2, n) * total
    log.debug("F_%d(%s, %s): %d terms up to norm %d", n, cusp, mpmath.nstr(t, 5), terms, X)
    return +value
