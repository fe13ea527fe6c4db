"""Completed twisted L-values, epsilon factors and functional-equation residuals.

With g(chi) the Gauss sum and M_psi the Mellin integral of the twisted theta
series,

    sum_b chi(b) c_qr(b/f) = 2 (-1)^(k+q+1) g(chi) M_psi
    Lambda(F, psi) = (-1)^(k+q+r) 2 psi_inf(f) / (D w tau(psi^-1)) * sum_b chi(b) c_qr(b/f)

M_psi is split at c: the part above c is summed in closed form and the part
below c is reflected through the Fricke involution onto the dual character.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import sympy

import config
from errors import (
    Ambiguous,
    ConductorNotCoprimeToLevel,
    FrickeSignUnknown,
    InputError,
    UnitIncompatible,
    UnsupportedCusp,
)
from forms.base import BianchiForm
from forms.stabilised import StabilisedForm
from hecke_chars import (
    CharacterValue,
    HeckeCharacter,
    dual_character,
    enumerate_characters,
    gauss_sum,
    inverse_character,
    make_character,
    normalized_gauss_sum,
    sympy_to_mpc,
    twist_by_norm,
)
from lfun.theta import (
    default_split_point,
    level_generator,
    reflection_constant,
    theta_series,
    twisted_level,
)
from padic.zfactor import z_product
from quadfield import Cusp, FieldElement, embed, ideals_up_to_norm
from reports import FEReport, LValueReport, Stopwatch

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Moment:
    """M_psi with its error certificate."""

    value: mpmath.mpc
    abs_error: mpmath.mpf
    terms_used: int
    split_point: Optional[mpmath.mpf]
    magnitude: mpmath.mpf


@dataclass(frozen=True)
class CuspValue:
    """c_qr(a) with its error certificate."""

    cusp: Cusp
    q: int
    r: int
    value: mpmath.mpc
    abs_error: mpmath.mpf


@dataclass(frozen=True)
class EpsilonFactor:
    """-eps |nu|^k tau(psi |.|^-k) / (psi_f(-nu) psi_inf(-nu) tau(psi^-1))."""

    sign: int
    nu_power: sympy.Expr
    character_value: CharacterValue
    gauss_ratio: mpmath.mpc
    value: mpmath.mpc

    @property
    def magnitude(self) -> mpmath.mpf:
        return abs(self.value)


@dataclass(frozen=True)
class FrickeEstimate:
    """The Fricke sign that makes the functional equation hold."""

    sign: int
    confidence: mpmath.mpf
    residuals: Dict[int, mpmath.mpf] = field(default_factory=dict)
    characters: Tuple[str, ...] = ()
    supplied: bool = False
    classical: Optional[int] = None

    @property
    def agrees_with_classical(self) -> Optional[bool]:
        if self.classical is None:
            return None
        return self.classical == self.sign


def _prec(prec: Optional[int]) -> int:
    return prec or config.DEFAULT_PRECISION


def _base_of(form: BianchiForm) -> BianchiForm:
    return form.base if isinstance(form, StabilisedForm) else form


def _check_type(form: BianchiForm, psi: HeckeCharacter) -> None:
    if psi.field != form.field:
        raise InputError(f"{psi.id} lives over {psi.field}, {form.label} over {form.field}")
    q, r = psi.inf_type
    if not (0 <= q <= form.k and 0 <= r <= form.k):
        raise InputError(f"infinity type ({q},{r}) of {psi.id} is outside 0 <= q, r <= k = {form.k}")


def relative_tolerance(prec: int) -> mpmath.mpf:
    return max(mpmath.mpf(10) ** (-(prec - config.GUARD_DIGITS)), mpmath.mpf(config.TOLERANCE_FLOOR))


# ─── Mellin integrals ───────────────────────────────────────────────────────

def _lower_branch(base: BianchiForm, psi: HeckeCharacter, prec: int, c) -> Tuple[mpmath.mpc, mpmath.mpf, int]:
    """int_0^c t^(s0-1) Theta_psi(t) dt = E |m|^-s0 I_psi*(1/(|m| c))."""
    E = reflection_constant(base, psi, prec)
    dual = dual_character(psi, base.k)
    s0 = psi.q + psi.r + 2
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        m_abs = mpmath.sqrt(twisted_level(base, psi).norm())
        upper = theta_series(base, dual, prec).upper_integral(1 / (m_abs * c))
        scale = E * m_abs ** (-s0)
        return scale * upper.value, abs(scale) * upper.abs_error, upper.terms_used


def moment(form: BianchiForm, psi: HeckeCharacter, prec: Optional[int] = None, split_point=None) -> Moment:
    """M_psi = int_0^oo t^(q+r+1) Theta_psi(t) dt.

    Forms without a level (finitely many coefficients) are integrated over the
    whole half-line; stabilised forms reflect through their base form.
    """
    prec = _prec(prec)
    if form.level is None:
        theta = theta_series(form, psi, prec)
        full = theta.full_integral()
        return Moment(full.value, full.abs_error, full.terms_used, None, abs(full.value))

    base = _base_of(form)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        c = default_split_point(base, psi, prec) if split_point is None else mpmath.mpf(split_point)
        if c <= 0:
            raise InputError(f"split point must be positive, got {c}")
        upper = theta_series(form, psi, prec).upper_integral(c)
        value, error, terms = upper.value, upper.abs_error, upper.terms_used
        magnitude = abs(upper.value)

        if isinstance(form, StabilisedForm):
            for factor, size in _stabilised_shifts(form, psi, prec):
                lower, err, n = _lower_branch(base, psi, prec, c * size)
                value += factor * lower
                error += abs(factor) * err
                magnitude += abs(factor * lower)
                terms += n
        else:
            lower, err, n = _lower_branch(base, psi, prec, c)
            value += lower
            error += err
            magnitude += abs(lower)
            terms += n
    log.debug("M[%s, %s] at c=%s: %s (+- %s, %d terms)", form.label, psi.id, mpmath.nstr(c, 8),
              mpmath.nstr(value, 10), mpmath.nstr(error, 3), terms)
    return Moment(+value, error, terms, c, magnitude)


def _stabilised_shifts(form: StabilisedForm, psi: HeckeCharacter, prec: int) -> List[Tuple[mpmath.mpc, mpmath.mpf]]:
    """(weight, |pi_S|) for every subset S of stabilised primes coprime to f.

    Theta for the stabilised form is sum_S gamma_S chi(pi_S)^-1 (pi_S/|pi_S|)^ell Theta_base(|pi_S| t),
    so its lower branch is a sum of base lower branches at scaled split points
    weighted by gamma_S chi(pi_S)^-1 (pi_S/|pi_S|)^ell |pi_S|^-s0.
    """
    s0 = psi.q + psi.r + 2
    out = []
    for S in form.subsets():
        pi_s = form.field.element(1)
        gamma = mpmath.mpc(1)
        for prime in S:
            pi_s = pi_s * prime.gen
            gamma *= -form.beta(prime).to_complex(prec + config.GUARD_DIGITS)
        phase = psi.chi(pi_s)
        if phase is None:
            continue
        z = embed(pi_s, prec + config.GUARD_DIGITS)
        size = abs(z)
        weight = (gamma * mpmath.expjpi(-2 * mpmath.mpf(phase.numerator) / phase.denominator)
                  * (z / size) ** psi.ell * size ** (-s0))
        out.append((weight, size))
    return out


# ─── c_qr at cusps ──────────────────────────────────────────────────────────

def _trivial_character(form: BianchiForm, q: int, r: int) -> Optional[HeckeCharacter]:
    try:
        return make_character(form.field, 1, (q, r))
    except UnitIncompatible:
        return None


def _c_qr_zero(form: BianchiForm, q: int, r: int, prec: int, split_point) -> Tuple[mpmath.mpc, mpmath.mpf]:
    psi0 = _trivial_character(form, q, r)
    if psi0 is None:
        # the unit sum of (u/|u|)^(r-q) vanishes
        return mpmath.mpc(0), mpmath.mpf(0)
    m = moment(form, psi0, prec, split_point)
    sign = (-1) ** (form.k + q + 1)
    return 2 * sign * m.value, 2 * m.abs_error


def c_qr(form: BianchiForm, cusp: Cusp, q: int, r: int, prec: Optional[int] = None, split_point=None) -> CuspValue:
    """
    c_qr(a) = 2 binom(2k+2, k+q-r+1)^-1 (-1)^(k+r+1) int_0^oo t^(q+r) F_(k+q-r+1)(a, t) dt.

    Supported cusps are 0 (or any integral a) and b/pi with pi a prime not
    dividing the level. The latter decomposes over the characters of (O/pi)^x;
    the trivial character goes through the Ramanujan sum and the Hecke relation
    at pi.

    Raises:
        UnsupportedCusp: the denominator is not a prime coprime to the level
        FrickeSignUnknown: the form has no Fricke sign
    """
    prec = _prec(prec)
    if not (0 <= q <= form.k and 0 <= r <= form.k):
        raise InputError(f"(q, r) = ({q},{r}) is outside 0 <= q, r <= k = {form.k}")
    field = form.field
    num, den = cusp.numerator, cusp.denominator
    if den.is_zero():
        raise InputError("cusp denominator must be nonzero")
    if num.is_zero() or den.is_unit() or den.divides(num):
        value, err = _c_qr_zero(form, q, r, prec, split_point)
        return CuspValue(cusp, q, r, value, err)

    pi = field.ideal(den)
    if len(pi.factorization) != 1 or pi.factorization[0][1] != 1:
        raise UnsupportedCusp(f"cusp denominator {den!r} is not prime; only 0 and b/pi are supported")
    if form.level is not None and pi.divides(form.level.gen):
        raise UnsupportedCusp(f"cusp denominator {pi} divides the level {form.level}")
    # move to the canonical generator: b/den = (u b)/pi.gen
    u = den.exact_div(pi.gen)  # pi.gen / den, a unit
    b = num * u if u is not None else num
    k = form.k
    N = pi.norm
    s0 = q + r + 2
    sign = (-1) ** (k + q + 1)

    with mpmath.workdps(prec + config.GUARD_DIGITS):
        total = mpmath.mpc(0)
        error = mpmath.mpf(0)
        for chi in enumerate_characters(field, pi, (q, r)):
            m = moment(form, chi, prec, split_point)
            g = gauss_sum(chi, prec)
            phase = chi.chi(b)
            conj_value = mpmath.expjpi(-2 * mpmath.mpf(phase.numerator) / phase.denominator)
            total += conj_value * 2 * sign * g * m.value
            error += 2 * abs(g) * m.abs_error

        zero_value, zero_err = _c_qr_zero(form, q, r, prec, split_point)
        z = embed(pi.gen, prec + config.GUARD_DIGITS)
        size = abs(z)
        xi = (z / size) ** (r - q)
        c_pi = form.coefficient_complex(pi, prec)
        hecke = N * (xi * c_pi * size ** (-s0) - mpmath.mpf(N) ** (k + 1) * xi ** 2 * size ** (-2 * s0)) - 1
        total += hecke * zero_value
        error += abs(hecke) * zero_err

        value = total / (N - 1)
        error /= N - 1
    return CuspValue(cusp, q, r, +value, error)


# ─── Lambda ─────────────────────────────────────────────────────────────────

def lambda_value(form: BianchiForm, psi: HeckeCharacter, prec: Optional[int] = None, split_point=None,
                 generator: Optional[FieldElement] = None) -> LValueReport:
    """
    Lambda(F, psi) from the residue sum and the Gauss-sum prefactor.

    Args:
        form: any Bianchi form (base change, stabilised, or finitely supported)
        psi: a character of type (q, r) with 0 <= q, r <= k
        prec: decimal digits
        split_point: c for the reflected integral (defaults to N(m)^(-1/4))
        generator: generator of f used in psi_inf(f) and the Gauss sums; the
            product of prefactor and residue sum does not depend on it

    Raises:
        FrickeSignUnknown, ConductorNotCoprimeToLevel, QuadratureBudgetExceeded
    """
    prec = _prec(prec)
    watch = Stopwatch()
    _check_type(form, psi)
    k, (q, r) = form.k, psi.inf_type
    field = form.field
    gen = psi.conductor.gen if generator is None else generator

    m = moment(form, psi, prec, split_point)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        g = gauss_sum(psi, prec, generator=gen)
        residue_sum = 2 * (-1) ** (k + q + 1) * g * m.value
        psi_inf_f = psi.infinity_value(gen).to_complex(prec + config.GUARD_DIGITS)
        tau_inverse = psi.infinity_value(gen * field.delta).to_complex(prec + config.GUARD_DIGITS) * g
        prefactor = (-1) ** (k + q + r) * 2 * psi_inf_f / (field.D * field.w * tau_inverse)
        value = prefactor * residue_sum
        scale = abs(prefactor * 2 * g)
        error = scale * m.abs_error
        magnitude = scale * m.magnitude

    path = "full-line" if form.level is None else ("stabilised" if isinstance(form, StabilisedForm) else "theorem")
    report = LValueReport(
        form=form.label,
        character=psi.id,
        value=+value,
        split_point=m.split_point,
        fricke_sign_used=_base_of(form).fricke_sign if form.level is not None else None,
        certified_abs_error=error,
        terms_used=m.terms_used,
        precision=prec,
        path=path,
        magnitude=magnitude,
    )
    report.runtime_ms = watch.ms
    log.info("Lambda(%s, %s) = %s", form.label, psi.id, mpmath.nstr(value, 15))
    return report


def lambda_via_zfactor(form: StabilisedForm, psi: HeckeCharacter, prec: Optional[int] = None,
                       split_point=None) -> Tuple[LValueReport, mpmath.mpc]:
    """Lambda(F^alpha, psi) as Z(dual psi) * Lambda(F, psi); returns the base report and the factor."""
    prec = _prec(prec)
    base_report = lambda_value(form.base, psi, prec, split_point)
    factor = sympy_to_mpc(z_product(form, dual_character(psi, form.k)), prec + config.GUARD_DIGITS)
    return base_report, factor


# ─── Epsilon factor ─────────────────────────────────────────────────────────

def epsilon_factor(form: BianchiForm, psi: HeckeCharacter, prec: Optional[int] = None) -> EpsilonFactor:
    """
    The constant in Lambda(F, psi) = K * Lambda(F, psi^-1 |.|^k).

    Stabilised forms use the constant of their base form.

    Raises:
        FrickeSignUnknown: epsilon(n) is not known
        ConductorNotCoprimeToLevel: (n, f) != 1
    """
    prec = _prec(prec)
    base = _base_of(form)
    if base.fricke_sign is None:
        raise FrickeSignUnknown(f"{base.label}: epsilon(n) is unknown; pass --fricke-sign or run fricke-sign")
    nu = level_generator(base)
    local = psi.finite_value(-nu)
    if local.is_zero():
        raise ConductorNotCoprimeToLevel(f"conductor {psi.conductor} of {psi.id} is not coprime to the level {base.level}")
    character_value = local * psi.infinity_value(-nu)
    nu_power = sympy.sqrt(sympy.Integer(nu.norm())) ** base.k
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        ratio = (normalized_gauss_sum(twist_by_norm(psi, -base.k), prec)
                 / normalized_gauss_sum(inverse_character(psi), prec))
        value = (-base.fricke_sign * sympy_to_mpc(nu_power, prec + config.GUARD_DIGITS) * ratio
                 / character_value.to_complex(prec + config.GUARD_DIGITS))
    return EpsilonFactor(base.fricke_sign, nu_power, character_value, +ratio, +value)


def epsilon_magnitude(form: BianchiForm, psi: HeckeCharacter) -> mpmath.mpf:
    """(N(n)^(1/2) N(f) D)^(k-q-r), the expected |K|."""
    base = _base_of(form)
    n = level_generator(base).norm()
    return (mpmath.sqrt(n) * psi.conductor.norm * form.field.D) ** (base.k - psi.q - psi.r)


# ─── Functional equation ────────────────────────────────────────────────────

def compare_sides(lhs: LValueReport, rhs: LValueReport, K, lhs_factor, rhs_factor, prec: int) -> Tuple[mpmath.mpf, bool]:
    """Relative residual |a - b| / max(|a|, |b|); against the branch scale when both sides vanish."""
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        a = lhs_factor * lhs.value
        b = K * rhs_factor * rhs.value
        scale_a = abs(lhs_factor) * (lhs.magnitude or abs(lhs.value))
        scale_b = abs(K * rhs_factor) * (rhs.magnitude or abs(rhs.value))
        tol = mpmath.mpf(10) ** (-(prec - config.GUARD_DIGITS))
        floor = mpmath.mpf(10) ** (-2 * prec)
        absolute = abs(a) <= tol * scale_a and abs(b) <= tol * scale_b
        if absolute:
            denominator = max(scale_a, scale_b, floor)
        else:
            denominator = max(abs(a), abs(b), floor)
        return abs(a - b) / denominator, absolute


def fe_residual(form: BianchiForm, psi: HeckeCharacter, prec: Optional[int] = None, split_point=None,
                flip_sign: bool = False, tolerance=None) -> FEReport:
    """
    Both sides of the complex functional equation and their residual.

    The sides are evaluated at c0 * SPLIT_RATIO (c0 = N(m)^(-1/4)), where the
    reflected integral does not map onto itself. For a stabilised form the
    sides carry the interpolation factors Z(psi) and Z(dual psi).

    Args:
        flip_sign: negate the constant only (negative control; residual ~ 2)
    """
    prec = _prec(prec)
    base = _base_of(form)
    dual = dual_character(psi, form.k)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        if split_point is None:
            split_point = default_split_point(base, psi, prec) * mpmath.mpf(config.SPLIT_RATIO)
        eps = epsilon_factor(form, psi, prec)
        K = -eps.value if flip_sign else eps.value
        lhs = lambda_value(form, psi, prec, split_point)
        rhs = lambda_value(form, dual, prec, split_point)
        lhs_factor = rhs_factor = mpmath.mpc(1)
        label = "complex"
        if isinstance(form, StabilisedForm):
            lhs_factor = sympy_to_mpc(z_product(form, psi), prec + config.GUARD_DIGITS)
            rhs_factor = sympy_to_mpc(z_product(form, dual), prec + config.GUARD_DIGITS)
            label = "stabilised"
        residual, absolute = compare_sides(lhs, rhs, K, lhs_factor, rhs_factor, prec)
    tolerance = relative_tolerance(prec) if tolerance is None else mpmath.mpf(tolerance)
    report = FEReport(lhs, rhs, K, residual, tolerance, lhs_factor, rhs_factor, absolute, label)
    report.extra["flipped_sign"] = flip_sign
    log.info("FE %s %s: residual %s (%s)", form.label, psi.id, mpmath.nstr(residual, 5), report.verdict)
    return report


def stabilisation_check(form: StabilisedForm, psi: HeckeCharacter, prec: Optional[int] = None,
                        split_point=None, tolerance=None) -> FEReport:
    """Lambda(F^alpha, psi) from the stabilised coefficients against Z(dual psi) * Lambda(F, psi)."""
    prec = _prec(prec)
    direct = lambda_value(form, psi, prec, split_point)
    base_report, factor = lambda_via_zfactor(form, psi, prec, split_point)
    residual, absolute = compare_sides(direct, base_report, mpmath.mpc(1), mpmath.mpc(1), factor, prec)
    tolerance = relative_tolerance(prec) if tolerance is None else mpmath.mpf(tolerance)
    return FEReport(direct, base_report, mpmath.mpc(1), residual, tolerance,
                    mpmath.mpc(1), factor, absolute, "stabilisation")


# ─── Fricke sign ────────────────────────────────────────────────────────────

def default_characters(form: BianchiForm, count: int = 2, max_norm: int = 50) -> List[HeckeCharacter]:
    """The trivial character and primitive type-(0,0) characters of small conductor coprime to the level."""
    base = _base_of(form)
    chars = [make_character(form.field, 1, (0, 0), label="trivial")]
    for f in ideals_up_to_norm(form.field, max_norm):
        if len(chars) >= count:
            break
        if f.is_unit_ideal() or not f.coprime_to(base.level):
            continue
        for psi in enumerate_characters(form.field, f, (0, 0)):
            chars.append(psi)
            break
    return chars


def split_pairs(form: BianchiForm, psi: HeckeCharacter, prec: int) -> List[Tuple[mpmath.mpf, mpmath.mpf]]:
    """(c for psi, c for the dual) pairs placed off the fixed point c0."""
    ratio = mpmath.mpf(config.SPLIT_RATIO)
    c0 = default_split_point(_base_of(form), psi, prec)
    return [(c0 * ratio, c0 / ratio), (c0 * ratio ** 2, c0)]


def fricke_sign_estimate(form: BianchiForm, prec: Optional[int] = None,
                         characters: Optional[Sequence[HeckeCharacter]] = None,
                         supplied: Optional[int] = None, min_ratio=10) -> FrickeEstimate:
    """
    epsilon(n) from the functional equation under both hypotheses.

    Each hypothesis evaluates Lambda(psi) and Lambda(dual psi) at different
    split points for every character; only the true sign makes both values
    independent of the split.

    Raises:
        Ambiguous: the residual ratio between the hypotheses is below ``min_ratio``
    """
    prec = _prec(prec)
    base = _base_of(form)
    classical = base.classical_fricke_sign() if hasattr(base, "classical_fricke_sign") else None
    if supplied is not None:
        if supplied not in (1, -1):
            raise InputError(f"fricke sign must be +1 or -1, got {supplied}")
        return FrickeEstimate(supplied, mpmath.inf, {}, (), True, classical)

    chars = list(characters) if characters is not None else default_characters(form)
    if not chars:
        raise InputError(f"{form.label}: no character with conductor coprime to the level")
    residuals: Dict[int, mpmath.mpf] = {}
    for sign in (1, -1):
        hypothesis = form.with_fricke_sign(sign)
        worst = mpmath.mpf(0)
        for psi in chars:
            dual = dual_character(psi, form.k)
            K = epsilon_factor(hypothesis, psi, prec).value
            for c_lhs, c_rhs in split_pairs(form, psi, prec):
                lhs = lambda_value(hypothesis, psi, prec, c_lhs)
                rhs = lambda_value(hypothesis, dual, prec, c_rhs)
                residual, _ = compare_sides(lhs, rhs, K, mpmath.mpc(1), mpmath.mpc(1), prec)
                worst = max(worst, residual)
        residuals[sign] = worst
        log.debug("fricke hypothesis %+d: worst residual %s", sign, mpmath.nstr(worst, 5))

    best = min(residuals, key=lambda s: residuals[s])
    floor = mpmath.mpf(10) ** (-2 * prec)
    confidence = residuals[-best] / max(residuals[best], floor)
    if confidence < min_ratio:
        raise Ambiguous(
            f"{form.label}: both Fricke signs fit (residuals {mpmath.nstr(residuals[1], 3)} / "
            f"{mpmath.nstr(residuals[-1], 3)}); Lambda may vanish on {[p.id for p in chars]}, try other characters"
        )
    if residuals[best] > relative_tolerance(prec):
        log.warning("%s: best Fricke hypothesis %+d still has residual %s", form.label, best,
                    mpmath.nstr(residuals[best], 5))
    if classical is not None and classical != best:
        log.warning("%s: estimated Fricke sign %+d disagrees with the classical %+d", form.label, best, classical)
    return FrickeEstimate(best, confidence, residuals, tuple(p.id for p in chars), False, classical)
