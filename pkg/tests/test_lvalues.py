"""Twisted L-values, epsilon factors and the complex functional equation."""
import sys
from pathlib import Path

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import config
from data_loader import load_characters, load_newform
from errors import (
    ConductorNotCoprimeToLevel,
    FrickeSignUnknown,
    InputError,
    UnsupportedCusp,
)
from forms.base import SyntheticForm
from forms.base_change import base_change
from forms.factory import create_form
from forms.fourier import fourier_term
from forms.stabilised import stabilise
from hecke_chars import dual_character, enumerate_characters, gauss_sum, make_character
from lfun.lvalues import (
    c_qr,
    epsilon_factor,
    epsilon_magnitude,
    fe_residual,
    fricke_sign_estimate,
    lambda_value,
    moment,
    stabilisation_check,
)
from lfun.oracle import base_change_lambda_oracle
from lfun.symbols import algebraicity_check, modular_symbol_value
from quadfield import Cusp, ImagQuadField

QI = ImagQuadField(-1)
PREC = 20


def rel_close(x, y, eps):
    return mpmath.almosteq(x, y, rel_eps=mpmath.mpf(eps))


@pytest.fixture(scope="module")
def f11():
    return load_newform("11a")


@pytest.fixture(scope="module")
def form11(f11):
    return create_form(f11, QI, "classical")


@pytest.fixture(scope="module")
def form54():
    return create_form(load_newform("5.4.a"), QI, "classical")


@pytest.fixture(scope="module")
def trivial():
    return make_character(QI, 1, (0, 0), label="trivial")


@pytest.fixture(scope="module")
def mod3():
    (psi,) = enumerate_characters(QI, 3, (0, 0))
    return psi


# ──────────────────────────────────────────────────────────────────
# Lambda against the classical factorisation
# ──────────────────────────────────────────────────────────────────

def test_trivial_lambda_matches_classical_oracle(f11, form11, trivial):
    computed = lambda_value(form11, trivial, PREC)
    expected = base_change_lambda_oracle(f11, QI, 0, prec=PREC)
    assert rel_close(computed.value, expected.value, "1e-8")
    assert computed.path == "theorem"
    assert computed.fricke_sign_used == -1


def test_weight_four_lambda_matches_oracle(form54):
    psi = make_character(QI, 1, (1, 1))
    computed = lambda_value(form54, psi, PREC)
    expected = base_change_lambda_oracle(load_newform("5.4.a"), QI, 1, prec=PREC)
    assert rel_close(computed.value, expected.value, "1e-8")


def test_lambda_is_independent_of_split_point(form11, mod3):
    a = lambda_value(form11, mod3, PREC, split_point=mpmath.mpf("0.3"))
    b = lambda_value(form11, mod3, PREC, split_point=mpmath.mpf("0.5"))
    assert abs(a.value - b.value) <= mpmath.mpf(10) ** -10 * max(a.magnitude, b.magnitude)


@settings(max_examples=5, deadline=None)
@given(st.floats(min_value=0.15, max_value=0.45), st.floats(min_value=0.15, max_value=0.45))
def test_lambda_split_point_pairs(form11, mod3, c1, c2):
    a = lambda_value(form11, mod3, PREC, split_point=mpmath.mpf(c1))
    b = lambda_value(form11, mod3, PREC, split_point=mpmath.mpf(c2))
    assert abs(a.value - b.value) <= mpmath.mpf(10) ** -10 * max(a.magnitude, b.magnitude)


def test_lambda_is_independent_of_conductor_generator(form11, mod3):
    a = lambda_value(form11, mod3, PREC)
    b = lambda_value(form11, mod3, PREC, generator=QI.element(0, 3))
    assert abs(a.value - b.value) <= mpmath.mpf(10) ** -10 * a.magnitude


def test_certified_error_is_small(form11, trivial):
    report = lambda_value(form11, trivial, PREC)
    assert report.certified_abs_error < mpmath.mpf(10) ** -12 * report.magnitude
    assert report.terms_used > 0


def test_synthetic_form_uses_full_line(trivial):
    form = SyntheticForm(QI, 0, {QI.unit_ideal: 1})
    report = lambda_value(form, trivial, PREC)
    assert report.path == "full-line"
    assert report.fricke_sign_used is None


def test_zero_form_has_zero_lambda(trivial):
    report = lambda_value(SyntheticForm(QI, 0, {}), trivial, PREC)
    assert report.value == 0


# ──────────────────────────────────────────────────────────────────
# Guards
# ──────────────────────────────────────────────────────────────────

def test_unknown_fricke_sign(f11, trivial):
    form = base_change(f11, QI)
    with pytest.raises(FrickeSignUnknown):
        lambda_value(form, trivial, PREC)


def test_conductor_meeting_level(form11):
    psi = next(iter(enumerate_characters(QI, 11, (0, 0))))
    with pytest.raises(ConductorNotCoprimeToLevel):
        epsilon_factor(form11, psi, PREC)


def test_infinity_type_outside_weight(form11):
    (psi,) = enumerate_characters(QI, (2, 2), (1, 0))
    with pytest.raises(InputError):
        lambda_value(form11, psi, PREC)


# ──────────────────────────────────────────────────────────────────
# Epsilon factor and functional equation
# ──────────────────────────────────────────────────────────────────

def test_epsilon_magnitude(form11, form54, mod3):
    assert rel_close(epsilon_factor(form11, mod3, PREC).magnitude, epsilon_magnitude(form11, mod3), "1e-15")
    for psi in load_characters("qi_mod3_weight4", QI):
        assert rel_close(epsilon_factor(form54, psi, PREC).magnitude, epsilon_magnitude(form54, psi), "1e-15")


def test_functional_equation_weight_two(form11, trivial, mod3):
    for psi in (trivial, mod3):
        report = fe_residual(form11, psi, PREC)
        assert report.passed, (psi.id, report.residual)
    assert fe_residual(form11, trivial, PREC).rhs.character == "trivial*"


def test_functional_equation_weight_four(form54):
    for psi in load_characters("qi_quartic", QI):
        report = fe_residual(form54, psi, PREC)
        assert report.passed, (psi.id, report.residual)


def test_flipped_sign_fails_by_two(form11, trivial):
    report = fe_residual(form11, trivial, PREC, flip_sign=True)
    assert not report.passed
    assert abs(report.residual - 2) < mpmath.mpf("0.01")
    assert report.extra["flipped_sign"] is True


def test_epsilon_of_dual_is_the_inverse(form11, form54, mod3):
    pairs = [(form11, mod3)] + [(form54, psi) for psi in load_characters("qi_quartic", QI)]
    for form, psi in pairs:
        eps = epsilon_factor(form, psi, PREC).value
        eps_dual = epsilon_factor(form, dual_character(psi, form.k), PREC).value
        assert rel_close(eps * eps_dual, 1, "1e-12"), psi.id


def test_functional_equation_over_another_field(f11):
    # 11 splits in Q(sqrt(-7))
    field = ImagQuadField(-7)
    form = create_form(f11, field, "classical")
    report = fe_residual(form, make_character(field, 1, (0, 0), label="trivial"), PREC)
    assert report.passed, report.residual


def test_fricke_sign_estimate(f11):
    estimate = fricke_sign_estimate(base_change(f11, QI), PREC)
    assert estimate.sign == -1
    assert estimate.agrees_with_classical is True
    assert estimate.confidence > 10 ** 6


def test_supplied_fricke_sign_is_returned(f11):
    estimate = fricke_sign_estimate(base_change(f11, QI), 15, supplied=1)
    assert estimate.sign == 1 and estimate.supplied
    assert estimate.agrees_with_classical is False


# ──────────────────────────────────────────────────────────────────
# Stabilised forms
# ──────────────────────────────────────────────────────────────────

def test_stabilisation_against_z_factor(form11, trivial, mod3):
    form = stabilise(form11, 5)
    for psi in (trivial, mod3):
        report = stabilisation_check(form, psi, PREC)
        assert report.passed, (psi.id, report.residual)


def test_functional_equation_of_stabilised_form(form11, trivial):
    report = fe_residual(stabilise(form11, 5), trivial, PREC)
    assert report.label == "stabilised"
    assert report.passed


# ──────────────────────────────────────────────────────────────────
# Cusp values and modular symbols
# ──────────────────────────────────────────────────────────────────

def test_c_qr_at_zero_is_the_trivial_moment(form11, trivial):
    value = c_qr(form11, Cusp.zero(QI), 0, 0, PREC)
    m = moment(form11, trivial, PREC)
    assert rel_close(value.value, -2 * m.value, "1e-15")


def test_unsupported_cusps(form11):
    with pytest.raises(UnsupportedCusp):
        c_qr(form11, Cusp(QI.element(1), QI.element(2)), 0, 0, PREC)
    with pytest.raises(UnsupportedCusp):
        c_qr(form11, Cusp(QI.element(1), QI.element(11)), 0, 0, PREC)


def test_prime_cusp_values_recover_the_twisted_moment(form11):
    # sum_b chi(b) c_00(b/3) = 2 (-1)^(k+1) g(chi) M_chi for the quadratic chi mod 3
    (chi,) = enumerate_characters(QI, 3, (0, 0))
    three = QI.element(3)
    with mpmath.workdps(PREC + 10):
        total = mpmath.mpc(0)
        for b in chi.group.elements:
            phase = chi.chi(b)
            value = c_qr(form11, Cusp(b, three), 0, 0, PREC).value
            total += mpmath.expjpi(2 * mpmath.mpf(phase.numerator) / phase.denominator) * value
        expected = 2 * (-1) ** (form11.k + 1) * gauss_sum(chi, PREC) * moment(form11, chi, PREC).value
    assert rel_close(total, expected, "1e-12")


def test_modular_symbol_at_prime_cusp(form11):
    symbol = modular_symbol_value(form11, Cusp(QI.element(1), QI.element(3)), PREC)
    assert list(symbol.coefficients) == [(0, 0)]
    assert symbol.abs_error < mpmath.mpf(10) ** -10
    # weight (0, 0): the polynomial is a constant
    assert symbol.polynomial(10).free_symbols == set()


def test_algebraicity_of_a_quadratic_ratio():
    with mpmath.workdps(40):
        x = 3 * mpmath.sqrt(2) / 7
    check = algebraicity_check([x, 1], degree=2, maxcoeff=100, prec=40)
    assert check.recognised
    assert check.imag_vanishes
    assert check.real_poly in ((49, 0, -18), (-49, 0, 18))


def test_algebraicity_needs_two_values():
    with pytest.raises(InputError):
        algebraicity_check([1, 2, 3])


# ──────────────────────────────────────────────────────────────────
# c_qr against the Fourier expansion
# ──────────────────────────────────────────────────────────────────

def fourier_c_qr(form, cusp, q, r):
    """2 binom(2k+2, n)^-1 (-1)^(k+r+1) int_0^oo t^(q+r) F_n(a, t) dt with n = k+q-r+1."""
    k = form.k
    n = k + q - r + 1
    with mpmath.workdps(PREC + 10):
        integral = mpmath.quad(lambda t: t ** (q + r) * fourier_term(form, n, cusp, t, PREC), [0, 1, mpmath.inf])
        return 2 / mpmath.binomial(2 * k + 2, n) * (-1) ** (k + r + 1) * integral


@pytest.fixture
def no_t_floor(monkeypatch):
    monkeypatch.setattr(config, "T_FLOOR", "0")


SMALL_FORM = {(1, 0): 1, (1, 1): 2, (2, 1): -1, (2, 0): 3}


@pytest.mark.parametrize("q, r", [(0, 0), (1, 1), (0, 1)])
def test_c_qr_matches_fourier_quadrature(no_t_floor, q, r):
    form = SyntheticForm(QI, 1, {QI.ideal(gen): c for gen, c in SMALL_FORM.items()})
    for cusp in (Cusp.zero(QI), Cusp(QI.element(1, 1), QI.element(0, 1))):
        expected = fourier_c_qr(form, cusp, q, r)
        value = c_qr(form, cusp, q, r, PREC).value
        if q == r:
            assert rel_close(value, expected, "1e-12"), cusp
        else:
            # the unit sum of (u/|u|)^(r-q) vanishes over Q(i)
            assert value == 0
            assert abs(expected) < mpmath.mpf(10) ** -15


def test_fourier_components_are_conjugate():
    field = ImagQuadField(-2)
    one, plus, minus = field.unit_ideal, field.ideal((1, 1)), field.ideal((-1, 1))
    symmetric = SyntheticForm(field, 1, {one: 1, plus: 2, minus: 2})
    lopsided = SyntheticForm(field, 1, {one: 1, plus: 2, minus: -1})
    zero = Cusp.zero(field)
    with mpmath.workdps(PREC + 10):
        for t in ("0.05", "0.2", "1"):
            f0 = fourier_term(lopsided, 0, zero, t, PREC)
            assert rel_close(fourier_term(lopsided, 4, zero, t, PREC), mpmath.conj(f0), "1e-18")
            assert abs(f0.imag) > mpmath.mpf(10) ** -5 * abs(f0)
            assert abs(fourier_term(symmetric, 0, zero, t, PREC).imag) < mpmath.mpf(10) ** -18


if __name__ == "__main__":
    f = load_newform("11a")
    form = create_form(f, QI, "classical")
    psi0 = make_character(QI, 1, (0, 0), label="trivial")
    test_trivial_lambda_matches_classical_oracle(f, form, psi0)
    print("✓ Lambda matches the classical factorisation")
    test_functional_equation_weight_two(form, psi0, next(iter(enumerate_characters(QI, 3, (0, 0)))))
    test_flipped_sign_fails_by_two(form, psi0)
    print("✓ Functional equation")
    test_algebraicity_of_a_quadratic_ratio()
    print("✓ Algebraicity")
    test_zero_form_has_zero_lambda(psi0)
    test_fourier_components_are_conjugate()
    print("✓ Fourier expansion")
