"""Twisted theta series of a Bianchi form and their Mellin integrals.

For a character psi of type (q, r), ell = r - q and A = 4 pi / sqrt(D),

    Theta_psi(t) = sum_{beta != 0} c((beta)) chi(beta)^-1 (beta/|beta|)^ell K_ell(A |beta| t)

Unit compatibility makes every generator of an ideal contribute the same
term, so the sum runs over canonical generators and is multiplied by w. Terms
are grouped by norm so each Bessel evaluation is shared.

The Mellin integral M_psi = int_0^oo t^(q+r+1) Theta_psi(t) dt gives
Lambda(F, psi) = 4 M_psi / (w delta^(q+r+2)).
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import mpmath

import config
from errors import (
    ConductorNotCoprimeToLevel,
    FrickeSignUnknown,
    QuadratureBudgetExceeded,
)
from hecke_chars import HeckeCharacter, gauss_sum, inverse_character
from lfun.bessel import bessel_k, complete_moment, cutoff_argument, incomplete_moment
from quadfield import FieldElement, embed, ideals_up_to_norm

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Integral:
    """A computed integral with its truncation/quadrature error estimate."""

    value: mpmath.mpc
    abs_error: mpmath.mpf
    terms_used: int


class ThetaSeries:
    """Theta_psi for one (form, character) pair at a fixed precision."""

    def __init__(self, form, psi: HeckeCharacter, prec: int):
        self.form = form
        self.psi = psi
        self.prec = prec
        self.field = form.field
        self.k = form.k
        self.q, self.r = psi.inf_type
        self.ell = psi.ell
        self.s0 = self.q + self.r + 2
        self.w = self.field.w
        self.support_norm: Optional[int] = getattr(form, "support_norm", None)
        with mpmath.workdps(prec + config.GUARD_DIGITS):
            self.A = 4 * mpmath.pi / mpmath.sqrt(self.field.D)
        self._norm_bound = 0
        self._groups: Dict[int, mpmath.mpc] = {}

    def __repr__(self) -> str:
        return f"ThetaSeries({self.form.label}, {self.psi.id}, prec={self.prec})"

    # ─── Coefficients ───────────────────────────────────────────────────────

    def _weight(self, ideal) -> mpmath.mpc:
        phase = self.psi.chi(ideal.gen)
        if phase is None:
            return mpmath.mpc(0)
        c = self.form.coefficient_complex(ideal, self.prec + config.GUARD_DIGITS)
        if c == 0:
            return mpmath.mpc(0)
        z = embed(ideal.gen, self.prec + config.GUARD_DIGITS)
        direction = z / abs(z)
        return c * mpmath.expjpi(-2 * mpmath.mpf(phase.numerator) / phase.denominator) * direction ** self.ell

    def extend(self, X: int) -> None:
        """Make the grouped sums available for every norm <= X."""
        if self.support_norm is not None:
            X = min(X, self.support_norm)
        if X <= self._norm_bound:
            return
        if X > config.MAX_THETA_NORM:
            raise QuadratureBudgetExceeded(
                f"{self}: truncation needs ideals of norm up to {X}, over the budget {config.MAX_THETA_NORM}; "
                f"move the split point or lower the precision"
            )
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            for ideal in ideals_up_to_norm(self.field, X):
                if ideal.norm <= self._norm_bound:
                    continue
                weight = self._weight(ideal)
                if weight != 0:
                    self._groups[ideal.norm] = self._groups.get(ideal.norm, mpmath.mpc(0)) + weight
        log.debug("%s: grouped %d norms up to %d", self, len(self._groups), X)
        self._norm_bound = X

    def groups(self, X: int) -> List[Tuple[int, mpmath.mpc]]:
        self.extend(X)
        return sorted((N, s) for N, s in self._groups.items() if N <= X)

    def truncation_norm(self, t) -> int:
        """Largest norm whose terms matter at t."""
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            x_cut = cutoff_argument(self.prec, self.k, self.q, self.r)
            X = int(mpmath.floor((x_cut / (self.A * t)) ** 2)) + 1
        if self.support_norm is not None:
            return min(X, self.support_norm)
        return X

    # ─── Evaluation ─────────────────────────────────────────────────────────

    def value(self, t) -> mpmath.mpc:
        """Theta_psi(t)."""
        X = self.truncation_norm(t)
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            total = mpmath.mpc(0)
            for N, s in self.groups(X):
                total += s * bessel_k(self.ell, self.A * mpmath.sqrt(N) * t, self.prec)
            return self.w * total

    def _tail_bound(self, X: int, c) -> mpmath.mpf:
        if self.support_norm is not None and X >= self.support_norm:
            return mpmath.mpf(0)
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            edge = self.A * mpmath.sqrt(X)
            head = edge ** (-self.s0) * incomplete_moment(edge * c, self.q, self.r, self.prec)
            scale = 1 + 1 / (self.A * c)
            return 4 * self.w * mpmath.mpf(X) ** (mpmath.mpf(self.k + 3) / 2) * head * scale

    def upper_integral(self, c) -> Integral:
        """int_c^oo t^(q+r+1) Theta_psi(t) dt in closed form, term by term."""
        X = self.truncation_norm(c)
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            c = mpmath.mpf(c)
            total = mpmath.mpc(0)
            terms = 0
            for N, s in self.groups(X):
                scale = self.A * mpmath.sqrt(N)
                total += s * scale ** (-self.s0) * incomplete_moment(scale * c, self.q, self.r, self.prec)
                terms += 1
            total *= self.w
            err = self._tail_bound(X, c)
        return Integral(+total, err, terms)

    def full_integral(self) -> Integral:
        """int_0^oo t^(q+r+1) Theta_psi(t) dt for finitely supported coefficients."""
        if self.support_norm is None:
            raise QuadratureBudgetExceeded(f"{self}: the full-line integral needs finitely many coefficients")
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            groups = self.groups(self.support_norm)
            if not groups:
                return Integral(mpmath.mpc(0), mpmath.mpf(0), 0)
            scale = 1 / (self.A * mpmath.sqrt(groups[0][0]))
            x_cut = cutoff_argument(self.prec, self.k, self.q, self.r)
            f = lambda t: t ** (self.s0 - 1) * self.value(t)
            value, err = mpmath.quad(f, [0, scale, 4 * scale, x_cut * scale],
                                     maxdegree=config.QUAD_MAX_DEGREE, error=True)
            tolerance = mpmath.mpf(10) ** (-(self.prec - config.GUARD_DIGITS)) * max(abs(value), 1)
            if err > tolerance:
                raise QuadratureBudgetExceeded(f"{self}: quadrature error {mpmath.nstr(err, 5)} over {mpmath.nstr(tolerance, 5)}")
        return Integral(+value, err, len(groups))

    def upper_integral_quadrature(self, c) -> Integral:
        """int_c^oo t^(q+r+1) Theta_psi(t) dt by tanh-sinh quadrature (cross-check path)."""
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            c = mpmath.mpf(c)
            x_cut = cutoff_argument(self.prec, self.k, self.q, self.r)
            t_max = x_cut / self.A
            if t_max <= c:
                return Integral(mpmath.mpc(0), mpmath.mpf(0), 0)
            f = lambda t: t ** (self.s0 - 1) * self.value(t)
            points = [c, 2 * c, 4 * c, t_max] if 4 * c < t_max else [c, t_max]
            value, err = mpmath.quad(f, points, maxdegree=config.QUAD_MAX_DEGREE, error=True)
            tolerance = mpmath.mpf(10) ** (-(self.prec - config.GUARD_DIGITS)) * max(abs(value), 1)
            if err > tolerance:
                raise QuadratureBudgetExceeded(f"{self}: quadrature error {mpmath.nstr(err, 5)} over {mpmath.nstr(tolerance, 5)}")
        return Integral(+value, err, len(self._groups))

    def synthetic_moment(self) -> mpmath.mpc:
        """sum over terms of the Gamma-product Mellin transform (finite support only)."""
        with mpmath.workdps(self.prec + config.GUARD_DIGITS):
            total = mpmath.mpc(0)
            for N, s in self.groups(self.support_norm or 0):
                total += s * (self.A * mpmath.sqrt(N)) ** (-self.s0) * complete_moment(self.q, self.r)
            return self.w * total


@lru_cache(maxsize=64)
def theta_series(form, psi: HeckeCharacter, prec: int) -> ThetaSeries:
    """Shared ThetaSeries per (form, character, precision)."""
    return ThetaSeries(form, psi, prec)


# ─── Reflection ─────────────────────────────────────────────────────────────

def level_generator(form) -> FieldElement:
    """nu with n = (nu)."""
    nu = getattr(form, "nu", None)
    return nu if nu is not None else form.level.gen


def twisted_level(form, psi: HeckeCharacter) -> FieldElement:
    """m = nu f^2."""
    f = psi.conductor.gen
    return level_generator(form) * f * f


def default_split_point(form, psi: HeckeCharacter, prec: int) -> mpmath.mpf:
    """c0 = N(m)^(-1/4), the fixed point of t -> 1/(|m| t)."""
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        return mpmath.mpf(twisted_level(form, psi).norm()) ** (-mpmath.mpf(1) / 4)


def reflection_constant(form, psi: HeckeCharacter, prec: int) -> mpmath.mpc:
    """E with Theta_psi(1/(|m| t)) = E t^(2k+4) Theta_psi*(t), psi* the dual character.

    E = eps (-1)^n chi(-nu)^-1 m^ell |m|^(n+1) g(conj chi) / g(chi), n = k + q - r + 1.

    Raises:
        FrickeSignUnknown: the form has no Fricke sign
        ConductorNotCoprimeToLevel: chi(-nu) = 0
    """
    if form.fricke_sign is None:
        raise FrickeSignUnknown(
            f"{form.label}: the reflected integral needs the Fricke sign; pass --fricke-sign or run fricke-sign first"
        )
    nu = level_generator(form)
    phase = psi.chi(-nu)
    if phase is None:
        raise ConductorNotCoprimeToLevel(f"conductor {psi.conductor} of {psi.id} is not coprime to the level {form.level}")
    q, r = psi.inf_type
    n = form.k + q - r + 1
    m = twisted_level(form, psi)
    with mpmath.workdps(prec + config.GUARD_DIGITS):
        m_c = embed(m, prec + config.GUARD_DIGITS)
        ratio = gauss_sum(inverse_character(psi, finite_only=True), prec) / gauss_sum(psi, prec)
        value = (
            form.fricke_sign
            * (-1) ** n
            * mpmath.expjpi(-2 * mpmath.mpf(phase.numerator) / phase.denominator)
            * m_c ** psi.ell
            * abs(m_c) ** (n + 1)
            * ratio
        )
    return +value
