"""Tests for newform data, base change, stabilisation and Fourier components."""
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import sympy

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from data_loader import load_newform
from errors import (
    InputError,
    InsufficientCoefficients,
    LevelNotCoprime,
    MissingRootNumber,
    ParseError,
    TFloorViolated,
    UnsupportedRamification,
)
from forms.base import SyntheticForm
from forms.base_change import base_change
from forms.factory import create_form, resolve_fricke_sign
from forms.fourier import fourier_term
from forms.newform_data import (
    ClassicalNewformData,
    eta_product_coefficients,
    generate_coefficients,
    ramanujan_violations,
)
from forms.stabilised import SlopeClass, StabilisedForm, slope_class, stabilise
from padic.hecke_roots import vieta_holds
from quadfield import Cusp, ImagQuadField

QI = ImagQuadField(-1)


@pytest.fixture(scope="module")
def f11():
    return load_newform("11a")


@pytest.fixture(scope="module")
def bc11(f11):
    return base_change(f11, QI)


# ──────────────────────────────────────────────────────────────────
# Classical newform data
# ──────────────────────────────────────────────────────────────────

def test_11a_q_expansion(f11):
    assert f11.an_list(10) == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2]


def test_coefficient_sources_agree_with_tables():
    eta_11a = generate_coefficients({"eta_product": [[1, 2], [11, 2]]}, 13)
    assert eta_11a == {2: -2, 3: -1, 5: 1, 7: -2, 11: 1, 13: 4}
    curve_37a = generate_coefficients({"weierstrass": [0, 0, 1, -1, 0]}, 7)
    assert curve_37a == {2: -2, 3: -3, 5: -2, 7: -1}
    weight4 = generate_coefficients({"eta_product": [[1, 4], [5, 4]]}, 7)
    assert weight4 == {2: -4, 3: 2, 5: -5, 7: 6}


def test_eta_product_needs_leading_q():
    with pytest.raises(ParseError):
        eta_product_coefficients([(1, 1), (2, 1)], 10)


def test_root_numbers():
    assert load_newform("11a").root_number() == 1
    assert load_newform("37a").root_number() == -1
    assert load_newform("5.4.a").root_number() == 1


def test_atkin_lehner_sign_from_coefficient():
    data = ClassicalNewformData("11a-bare", 11, 2, {2: -2, 3: -1, 11: 1})
    assert data.atkin_lehner_sign(11) == -1


def test_missing_root_number_at_square_level():
    data = ClassicalNewformData("27a-bare", 27, 2, {2: 0, 3: 0, 5: 0, 7: -1})
    with pytest.raises(MissingRootNumber):
        data.root_number()
    assert not data.has_atkin_lehner()


def test_require_names_first_missing_prime():
    data = ClassicalNewformData("short", 11, 2, {2: -2, 3: -1, 5: 1})
    with pytest.raises(InsufficientCoefficients) as info:
        data.require(10)
    assert info.value.prime == 7


def test_ramanujan_violation_detected():
    data = ClassicalNewformData("bad", 11, 2, {2: 3, 3: -1})
    assert ramanujan_violations(data) == [2]


# ──────────────────────────────────────────────────────────────────
# Base change
# ──────────────────────────────────────────────────────────────────

def test_base_change_prime_coefficients(bc11):
    assert bc11.label == "11a/K-1"
    assert bc11.coefficient(QI.ideal((1, 1))) == -2
    assert bc11.coefficient(QI.ideal((2, 1))) == 1
    assert bc11.coefficient(QI.ideal((2, -1))) == 1
    # inert: a_3^2 - 2*3
    assert bc11.coefficient(QI.ideal(3)) == -5


def test_base_change_prime_power_and_products(bc11):
    assert bc11.coefficient(QI.ideal(2)) == 2
    assert bc11.coefficient(QI.ideal(5)) == 1
    assert bc11.coefficient(QI.ideal((3, 3))) == 10


def test_non_integral_coefficient_is_zero(bc11):
    assert bc11.coefficient(QI.element(3), denominator=QI.element(1, 1)) == 0
    assert bc11.coefficient(QI.element(2), denominator=QI.element(1, 1)) == -2


@pytest.mark.parametrize("name", ["11a", "37a", "5.4.a"])
@pytest.mark.parametrize("d", [-1, -2, -3, -7])
def test_euler_factor_identity(name, d):
    newform = load_newform(name)
    field = ImagQuadField(d)
    form = base_change(newform, field)
    primes = [ell for ell in sympy.primerange(2, 101) if (newform.level * field.D) % ell]
    assert primes
    for ell in primes:
        assert form.euler_factor_identity(ell), ell


def test_classical_fricke_sign(bc11):
    assert bc11.classical_fricke_sign() == -1


def test_ramified_level_unsupported(f11):
    with pytest.raises(UnsupportedRamification):
        base_change(f11, ImagQuadField(-11))


# ──────────────────────────────────────────────────────────────────
# Factory
# ──────────────────────────────────────────────────────────────────

def test_create_form_with_classical_sign(f11):
    form = create_form(f11, QI, "classical")
    assert form.fricke_sign == -1


def test_explicit_sign_overrides(f11, bc11):
    assert resolve_fricke_sign(bc11, "+1") == 1
    assert resolve_fricke_sign(bc11, -1) == -1
    with pytest.raises(InputError):
        resolve_fricke_sign(bc11, "sideways")


def test_classical_sign_needs_atkin_lehner_data():
    data = ClassicalNewformData("27a-bare", 27, 2, {2: 0, 3: 0, 5: 0, 7: -1})
    form = base_change(data, QI)
    assert resolve_fricke_sign(form, None) is None
    with pytest.raises(MissingRootNumber):
        resolve_fricke_sign(form, "classical")


# ──────────────────────────────────────────────────────────────────
# Stabilisation
# ──────────────────────────────────────────────────────────────────

def test_stabilise_at_split_prime(bc11):
    form = stabilise(bc11, 5)
    assert isinstance(form, StabilisedForm)
    assert len(form.primes) == 2
    assert form.label == "11a/K-1/stab5++"
    assert all(v == 0 for v in form.slopes.values())
    assert slope_class(form).kind is SlopeClass.SMALL
    assert slope_class(form).is_small()


def test_critical_choice_at_split_prime(bc11):
    form = stabilise(bc11, 5, {0: "minus"})
    assert sorted(form.slopes.values()) == [0, 1]
    assert slope_class(form).kind is SlopeClass.CRITICAL


def test_stabilise_at_inert_prime(bc11):
    form = stabilise(bc11, 3)
    (prime,) = form.primes
    alpha, beta = form.alpha(prime), form.beta(prime)
    assert (alpha.trace, alpha.norm) == (-5, 9)
    assert (alpha.valuation, beta.valuation) == (Fraction(0), Fraction(2))
    assert vieta_holds(alpha, beta)


def test_up_operator_eigenvalue(bc11):
    form = stabilise(bc11, 5)
    for prime in form.primes:
        for m in (QI.unit_ideal, QI.ideal((1, 1)), prime, QI.ideal(3)):
            assert form.up_eigen_check(prime, m)


def test_stabilise_at_level_prime(bc11):
    with pytest.raises(LevelNotCoprime):
        stabilise(bc11, 11)


def test_create_form_stabilises(f11):
    form = create_form(f11, QI, "classical", prime=5, choices={0: "plus", 1: "plus"})
    assert isinstance(form, StabilisedForm)
    assert form.fricke_sign == -1
    assert form.base.fricke_sign == -1


# ──────────────────────────────────────────────────────────────────
# Fourier components
# ──────────────────────────────────────────────────────────────────

def test_single_term_fourier_component():
    form = SyntheticForm(QI, 0, {QI.unit_ideal: 1})
    t = mpmath.mpf("0.5")
    value = fourier_term(form, 1, Cusp.zero(QI), t, prec=20)
    # four units, binom(2, 1) = 2, A = 2 pi for D = 4
    expected = 8 * t * mpmath.besselk(0, 2 * mpmath.pi * t)
    assert mpmath.almosteq(value, expected, rel_eps=mpmath.mpf(10) ** -15)


def test_zero_form_has_zero_components():
    form = SyntheticForm(QI, 0)
    assert fourier_term(form, 0, Cusp.zero(QI), 1, prec=20) == 0


def test_fourier_term_guards():
    form = SyntheticForm(QI, 0, {QI.unit_ideal: 1})
    with pytest.raises(InputError):
        fourier_term(form, 3, Cusp.zero(QI), 1, prec=20)
    with pytest.raises(TFloorViolated):
        fourier_term(form, 1, Cusp.zero(QI), "1e-4", prec=20)


if __name__ == "__main__":
    f = load_newform("11a")
    bc = base_change(f, QI)
    test_11a_q_expansion(f)
    test_coefficient_sources_agree_with_tables()
    test_root_numbers()
    print("✓ Newform data")
    test_base_change_prime_coefficients(bc)
    test_base_change_prime_power_and_products(bc)
    test_classical_fricke_sign(bc)
    test_euler_factor_identity("37a", -7)
    print("✓ Base change")
    test_stabilise_at_split_prime(bc)
    test_stabilise_at_inert_prime(bc)
    test_up_operator_eigenvalue(bc)
    print("✓ Stabilisation")
    test_single_term_fourier_component()
    print("✓ Fourier components")
