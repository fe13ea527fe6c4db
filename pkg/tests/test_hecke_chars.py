"""Hecke character tests: construction, enumeration, values, Gauss sums, duals."""
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from errors import AlphaNotCoprime, ConductorNotPPower, InputError, MalformedSpec, UnitIncompatible
from hecke_chars import (
    CharacterValue,
    IdeleAtP,
    character_from_values,
    dual_character,
    enumerate_characters,
    gauss_sum,
    local_phase,
    make_character,
    p_fin_at_idele,
    p_fin_value,
    sigma_p,
    value_on_ideal,
)
from quadfield import ImagQuadField, ideals_up_to_norm, splitting_type

QI = ImagQuadField(-1)
CUBE = (2, 2)  # generates (1+i)^3


def close(x, y, digits=20):
    return mpmath.almosteq(x, y, rel_eps=mpmath.mpf(10) ** -digits)


# ──────────────────────────────────────────────────────────────────
# Enumeration counts over Q(i)
# ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("conductor, inf_type, expected", [
    (3, (0, 0), 1),
    (5, (0, 0), 3),
    (CUBE, (0, 0), 0),
    ((2, 1), (0, 0), 0),
    (CUBE, (1, 0), 1),
    (CUBE, (0, 1), 1),
    (3, (1, 0), 2),
    (3, (0, 1), 2),
    (3, (2, 1), 2),
    (3, (1, 2), 2),
])
def test_primitive_character_counts(conductor, inf_type, expected):
    assert len(list(enumerate_characters(QI, conductor, inf_type))) == expected


def test_mod3_character_is_quadratic():
    (psi,) = enumerate_characters(QI, 3, (0, 0))
    assert all(2 * phase % 1 == 0 for phase in psi.phases)
    assert not psi.is_trivial_finite()


def test_unit_phase_at_cube_of_ramified_prime():
    i = QI.element(0, 1)
    (psi10,) = enumerate_characters(QI, CUBE, (1, 0))
    (psi01,) = enumerate_characters(QI, CUBE, (0, 1))
    assert psi10.chi(i) == Fraction(3, 4)
    assert psi01.chi(i) == Fraction(1, 4)


# ──────────────────────────────────────────────────────────────────
# Validation
# ──────────────────────────────────────────────────────────────────

def test_unit_incompatible_finite_part():
    with pytest.raises(UnitIncompatible):
        make_character(QI, (2, 1), (0, 0), [(1, 4)])


def test_finite_part_with_wrong_length():
    with pytest.raises(MalformedSpec):
        make_character(QI, 3, (0, 0), [(1, 2), (1, 2), (1, 2)])


def test_imprimitive_finite_part_rejected():
    # trivial chi cannot have conductor (3)
    with pytest.raises(MalformedSpec) as info:
        make_character(QI, 3, (0, 0), "trivial")
    assert info.value.error_code == "NOT_PRIMITIVE"


def test_character_from_values_matches_enumeration():
    psi = character_from_values(QI, CUBE, (1, 0), {(0, 1): (3, 4)}, label="quartic")
    (expected,) = enumerate_characters(QI, CUBE, (1, 0))
    assert psi == expected
    assert psi.id == "quartic"


def test_character_from_values_without_match():
    with pytest.raises(MalformedSpec):
        character_from_values(QI, CUBE, (1, 0), {(0, 1): (1, 4)})


# ──────────────────────────────────────────────────────────────────
# Values
# ──────────────────────────────────────────────────────────────────

def test_value_is_multiplicative_on_coprime_ideals():
    psi = list(enumerate_characters(QI, 3, (2, 1)))[0]
    ideals = [m for m in ideals_up_to_norm(QI, 30) if m.coprime_to(psi.conductor)]
    for m in ideals[:8]:
        for n in ideals[:8]:
            lhs = value_on_ideal(psi, m * n).to_complex(30)
            rhs = value_on_ideal(psi, m).to_complex(30) * value_on_ideal(psi, n).to_complex(30)
            assert close(lhs, rhs)


def test_value_vanishes_off_coprime_ideals():
    (psi,) = enumerate_characters(QI, 3, (0, 0))
    assert value_on_ideal(psi, QI.ideal(3)).is_zero()
    assert value_on_ideal(psi, QI.ideal(6)).is_zero()


def test_value_magnitude_follows_infinity_type():
    psi = list(enumerate_characters(QI, 3, (1, 2)))[0]
    m = QI.ideal((2, 1))
    assert value_on_ideal(psi, m).abs_squared() == Fraction(5) ** 3


# ──────────────────────────────────────────────────────────────────
# Gauss sums
# ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("conductor", [3, 5])
def test_gauss_sum_has_norm_of_conductor(conductor):
    for psi in enumerate_characters(QI, conductor, (0, 0)):
        g = gauss_sum(psi, 30)
        assert close(abs(g) ** 2, psi.conductor.norm)


def test_gauss_sum_of_trivial_conductor():
    psi = make_character(QI, 1, (0, 0))
    assert gauss_sum(psi, 20) == 1


def test_gauss_sum_depends_on_generator_through_chi():
    psi = list(enumerate_characters(QI, 3, (1, 0)))[0]
    i = QI.element(0, 1)
    g = gauss_sum(psi, 30)
    g_shifted = gauss_sum(psi, 30, generator=QI.element(0, 3))
    chi_i = mpmath.expjpi(2 * mpmath.mpf(psi.chi(i).numerator) / psi.chi(i).denominator)
    assert close(g_shifted, chi_i * g)


# ──────────────────────────────────────────────────────────────────
# Duals and p-adic helpers
# ──────────────────────────────────────────────────────────────────

def test_dual_character_type_and_label():
    psi = list(enumerate_characters(QI, 3, (1, 2)))[0]
    dual = dual_character(psi, 4)
    assert dual.inf_type == (3, 2)
    assert dual.conductor == psi.conductor
    assert dual_character(dual, 4) == psi


def test_dual_label_is_starred():
    psi = character_from_values(QI, CUBE, (1, 0), {(0, 1): (3, 4)}, label="quartic")
    assert dual_character(psi, 2).label == "quartic*"


@pytest.mark.parametrize("k", [0, 1, 2, 4])
def test_character_times_dual_is_norm_power(k):
    psi = list(enumerate_characters(QI, 3, (2, 1)))[0]
    dual = dual_character(psi, k)
    for m in [m for m in ideals_up_to_norm(QI, 40) if m.coprime_to(psi.conductor)]:
        product = value_on_ideal(psi, m) * value_on_ideal(dual, m)
        assert product == CharacterValue(scalar=Fraction(m.norm) ** k)


@pytest.mark.parametrize("d, conductor, inf_type", [
    (-1, 3, (2, 1)),
    (-1, CUBE, (1, 0)),
    (-3, 7, (1, 0)),
])
def test_value_does_not_depend_on_the_generator(d, conductor, inf_type):
    field = ImagQuadField(d)
    psi = next(iter(enumerate_characters(field, conductor, inf_type)))
    for m in ideals_up_to_norm(field, 30):
        g = m.gen
        if not m.coprime_to(psi.conductor):
            continue
        base = (psi.finite_value(g) * psi.infinity_value(g)).to_complex(30)
        for u in field.units:
            shifted = (psi.finite_value(u * g) * psi.infinity_value(u * g)).to_complex(30)
            assert close(shifted, base)


def test_p_fin_value_needs_p_power_conductor():
    (psi,) = enumerate_characters(QI, 3, (0, 0))
    with pytest.raises(ConductorNotPPower):
        p_fin_value(psi, QI.element(2, 1), 5)
    with pytest.raises(AlphaNotCoprime):
        p_fin_value(psi, QI.element(3, 3), 3)


def test_sigma_p_magnitude():
    x = QI.element(1, 1)
    value = sigma_p(QI, 5, (1, 1), x)
    assert value.abs_squared() == Fraction(x.norm()) ** 2
    with pytest.raises(AlphaNotCoprime):
        sigma_p(QI, 5, (1, 0), QI.element(2, 1))


def test_sigma_p_on_split_components():
    # primes above 5 are ordered ((2+i), (1+2i)); 2+i is a unit only at the second
    assert [P.gen for P in splitting_type(QI, 5).primes] == [QI.element(2, 1), QI.element(1, 2)]
    one, x = QI.element(1), QI.element(2, 1)
    assert close(sigma_p(QI, 5, (0, 1), IdeleAtP(5, (one, x))).to_complex(20), mpmath.mpc(2, -1))
    assert close(sigma_p(QI, 5, (1, 0), IdeleAtP(5, (x.conj(), one))).to_complex(20), mpmath.mpc(2, -1))
    # x_Pbar only enters through the r-power
    assert close(sigma_p(QI, 5, (1, 0), IdeleAtP(5, (QI.element(3), x))).to_complex(20), 3)
    with pytest.raises(AlphaNotCoprime):
        sigma_p(QI, 5, (1, 0), IdeleAtP(5, (x, one)))
    with pytest.raises(InputError):
        sigma_p(QI, 5, (1, 0), IdeleAtP(5, (one,)))


# ──────────────────────────────────────────────────────────────────
# Local components at p
# ──────────────────────────────────────────────────────────────────

MOD5 = list(enumerate_characters(QI, 5, (0, 0)))
MOD5_TYPE_10 = list(enumerate_characters(QI, 5, (1, 0)))
coprime_to_5 = st.tuples(
    st.integers(min_value=-40, max_value=40), st.integers(min_value=-40, max_value=40)
).map(lambda ab: QI.element(*ab)).filter(lambda x: x.norm() % 5)


def test_local_phases_multiply_to_the_global_phase():
    above = splitting_type(QI, 5).primes
    for psi in MOD5:
        for x in psi.group.elements:
            total = sum(local_phase(psi, P, x) for P in above) % 1
            assert total == psi.chi(x)


def test_local_phase_of_one_mod_the_conductor():
    P, Pbar = splitting_type(QI, 5).primes
    for psi in MOD5:
        # 6 = 1 mod 5: both local components are trivial
        assert local_phase(psi, P, QI.element(6)) == 0
        assert local_phase(psi, Pbar, QI.element(6)) == 0
        # 2+2i = 1 mod (1+2i), so chi sees only the component at (2+i)
        x = QI.element(2, 2)
        assert local_phase(psi, Pbar, x) == 0
        assert local_phase(psi, P, x) == psi.chi(x)
    mod3 = next(iter(enumerate_characters(QI, 3, (0, 0))))
    assert local_phase(mod3, P, QI.element(2)) == 0


@settings(max_examples=100, deadline=None)
@given(coprime_to_5)
def test_p_fin_at_diagonal_idele_is_the_global_value(alpha):
    for psi in MOD5 + MOD5_TYPE_10:
        local = p_fin_at_idele(psi, IdeleAtP.diagonal(QI, 5, alpha)).to_complex(20)
        assert close(local, p_fin_value(psi, alpha, 5).to_complex(20), 15)


@settings(max_examples=100, deadline=None)
@given(coprime_to_5, coprime_to_5, st.sampled_from([0, 2]))
def test_dual_on_random_ideles(x, y, k):
    idele = IdeleAtP(5, (x, y))
    for psi in MOD5:
        lhs = p_fin_at_idele(dual_character(psi, k), idele).to_complex(20)
        rhs = (p_fin_at_idele(psi, idele).inverse() * sigma_p(QI, 5, (k, k), idele)).to_complex(20)
        assert close(lhs, rhs, 15)


@settings(max_examples=50, deadline=None)
@given(coprime_to_5, coprime_to_5)
def test_p_fin_is_multiplicative_in_the_components(x, y):
    one = QI.element(1)
    for psi in MOD5:
        joint = p_fin_at_idele(psi, IdeleAtP(5, (x, y))).to_complex(20)
        split = (p_fin_at_idele(psi, IdeleAtP(5, (x, one))) * p_fin_at_idele(psi, IdeleAtP(5, (one, y))))
        assert close(joint, split.to_complex(20), 15)


def test_p_fin_at_idele_guards():
    (mod3,) = enumerate_characters(QI, 3, (0, 0))
    one = QI.element(1)
    with pytest.raises(ConductorNotPPower):
        p_fin_at_idele(mod3, IdeleAtP(5, (one, one)))
    with pytest.raises(AlphaNotCoprime):
        p_fin_at_idele(MOD5[0], IdeleAtP(5, (one, QI.element(1, 2))))


if __name__ == "__main__":
    for args in [(3, (0, 0), 1), (5, (0, 0), 3), (CUBE, (1, 0), 1), (3, (2, 1), 2)]:
        test_primitive_character_counts(*args)
    test_mod3_character_is_quadratic()
    test_unit_phase_at_cube_of_ramified_prime()
    print("✓ Enumeration")
    test_unit_incompatible_finite_part()
    test_imprimitive_finite_part_rejected()
    test_character_from_values_matches_enumeration()
    print("✓ Validation")
    test_value_is_multiplicative_on_coprime_ideals()
    test_value_vanishes_off_coprime_ideals()
    test_gauss_sum_has_norm_of_conductor(3)
    print("✓ Values and Gauss sums")
    test_dual_character_type_and_label()
    test_dual_label_is_starred()
    print("✓ Duals")
    test_character_times_dual_is_norm_power(2)
    test_value_does_not_depend_on_the_generator(-3, 7, (1, 0))
    test_sigma_p_on_split_components()
    print("✓ Dual invariants and sigma_p")
    test_local_phases_multiply_to_the_global_phase()
    test_p_fin_at_diagonal_idele_is_the_global_value()
    test_dual_on_random_ideles()
    test_p_fin_at_idele_guards()
    print("✓ Local components at p")
