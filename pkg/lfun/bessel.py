"""Modified Bessel functions K_n for integer order.

``bessel_k`` is the production evaluator (mpmath). ``bessel_k_series`` is an
independent evaluation from the ascending series, used as an oracle in tests.
``incomplete_moment`` gives int_x^oo u^(q+r+1) K_|r-q|(u) du in closed form.
"""
import logging
import math
from typing import List

import mpmath

import config
from errors import InputError

log = logging.getLogger(__name__)


def _check_argument(x) -> None:
    if x <= 0:
        raise InputError(f"K_n(x) needs x > 0, got {x}", error_code="DOMAIN")


def bessel_k(n: int, x, prec: int) -> mpmath.mpf:
    """K_n(x) to prec digits; K_{-n} = K_n."""
    _check_argument(x)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        value = mpmath.besselk(abs(n), x)
    return +value


def bessel_k_series(n: int, x, prec: int) -> mpmath.mpf:
    """K_n(x) from the ascending series (Abramowitz-Stegun 9.6.11).

    The series cancels catastrophically for large x, so the working precision
    grows with x.
    """
    _check_argument(x)
    n = abs(n)
    extra = int(2 * float(x) / math.log(10)) + config.GUARD_DIGITS
    with mpmath.workdps(prec + extra):
        x = mpmath.mpf(x)
        half = x / 2
        quarter_sq = half * half
        eps = mpmath.mpf(10) ** (-(prec + extra))

        finite = mpmath.mpf(0)
        for k in range(n):
            finite += mpmath.factorial(n - k - 1) / mpmath.factorial(k) * (-quarter_sq) ** k
        finite *= half ** (-n) / 2

        # I_n(x) and the digamma-weighted series share their terms
        i_sum = mpmath.mpf(0)
        psi_sum = mpmath.mpf(0)
        h_k = mpmath.mpf(0)              # H_k
        h_nk = mpmath.harmonic(n)        # H_{n+k}
        term = 1 / mpmath.factorial(n)   # (x^2/4)^k / (k! (n+k)!)
        k = 0
        while True:
            weight = 2 * (-mpmath.euler) + h_k + h_nk
            i_sum += term
            psi_sum += weight * term
            if abs(term) * (1 + abs(weight)) < eps * abs(i_sum):
                break
            k += 1
            h_k += mpmath.mpf(1) / k
            h_nk += mpmath.mpf(1) / (n + k)
            term *= quarter_sq / (k * (n + k))
        bessel_i = half ** n * i_sum
        value = finite + (-1) ** (n + 1) * mpmath.log(half) * bessel_i + (-1) ** n * half ** n * psi_sum / 2
    return +value


def bessel_k_sequence(nu_max: int, x, prec: int) -> List[mpmath.mpf]:
    """[K_0(x), ..., K_nu_max(x)] by upward recurrence from K_0 and K_1."""
    _check_argument(x)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        values = [mpmath.besselk(0, x), mpmath.besselk(1, x)]
        for n in range(1, nu_max):
            values.append(values[n - 1] + 2 * n / mpmath.mpf(x) * values[n])
        return values[: nu_max + 1]


def recurrence_residual(n: int, x, prec: int) -> mpmath.mpf:
    """K_{n+1}(x) - K_{n-1}(x) - (2n/x) K_n(x), zero up to rounding."""
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        x = mpmath.mpf(x)
        value = bessel_k(n + 1, x, prec) - bessel_k(n - 1, x, prec) - 2 * n / x * bessel_k(n, x, prec)
    return +value


def cutoff_argument(prec: int, k: int, q: int, r: int) -> mpmath.mpf:
    """Bessel argument past which theta terms are below 10^-prec relative to the head."""
    return mpmath.mpf(prec) * mpmath.log(10) + 3 * (k + q + r + 3)


def moment_coefficients(q: int, r: int) -> List[int]:
    """c_j with int_x^oo u^(q+r+1) K_nu(u) du = sum_j c_j x^(2(a-j)+nu+j+1) K_(nu+j+1)(x)."""
    a = min(q, r)
    coeffs = [1]
    for j in range(1, a + 1):
        coeffs.append(coeffs[-1] * 2 * (a - j + 1))
    return coeffs


def incomplete_moment(x, q: int, r: int, prec: int) -> mpmath.mpf:
    """int_x^oo u^(q+r+1) K_|r-q|(u) du for x > 0, in closed form."""
    _check_argument(x)
    a, nu = min(q, r), abs(r - q)
    coeffs = moment_coefficients(q, r)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        x = mpmath.mpf(x)
        ks = bessel_k_sequence(nu + a + 1, x, prec)
        total = mpmath.mpf(0)
        for j, c in enumerate(coeffs):
            total += c * x ** (2 * (a - j) + nu + j + 1) * ks[nu + j + 1]
    return +total


def complete_moment(q: int, r: int) -> int:
    """int_0^oo u^(q+r+1) K_|r-q|(u) du = 2^(q+r) q! r!."""
    return 2 ** (q + r) * math.factorial(q) * math.factorial(r)
