"""Classical L-value oracle: known values, central zeros and certificate failures."""
import sys
from pathlib import Path

import mpmath
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from data_loader import load_newform
from errors import CertificateFailure, InputError
from lfun.oracle import base_change_lambda_oracle, classical_lvalue_oracle, oracle_terms
from quadfield import ImagQuadField

QI = ImagQuadField(-1)
PREC = 20

# L(E, 1) for the curve 11a
L_11A_1 = mpmath.mpf("0.25384186085591068433775892335")


def test_l_value_of_11a():
    value = classical_lvalue_oracle(load_newform("11a"), 1, prec=PREC)
    assert mpmath.almosteq(value.value, L_11A_1, rel_eps=mpmath.mpf(10) ** -15)
    assert value.abs_error < mpmath.mpf(10) ** -12
    assert value.root_number == 1


def test_central_zero_of_37a():
    value = classical_lvalue_oracle(load_newform("37a"), 1, prec=PREC)
    assert value.root_number == -1
    assert abs(value.value) < mpmath.mpf(10) ** -12


def test_wrong_root_number_breaks_certificate():
    with pytest.raises(CertificateFailure):
        classical_lvalue_oracle(load_newform("11a"), 1, prec=PREC, root_number=-1)


def test_quadratic_twist_root_number():
    value = classical_lvalue_oracle(load_newform("11a"), 1, twist_disc=-4, prec=PREC)
    assert value.level == 11 * 16
    assert value.root_number == 1
    assert value.label == "11ax-4"


def test_critical_strip_and_twist_guards():
    f = load_newform("11a")
    with pytest.raises(InputError):
        classical_lvalue_oracle(f, 2, prec=PREC)
    with pytest.raises(InputError):
        classical_lvalue_oracle(f, 1, twist_disc=-11, prec=PREC)
    with pytest.raises(InputError):
        base_change_lambda_oracle(f, QI, 1, prec=PREC)


def test_base_change_factorisation():
    f = load_newform("11a")
    combined = base_change_lambda_oracle(f, QI, 0, prec=PREC)
    untwisted = classical_lvalue_oracle(f, 1, prec=PREC)
    twisted = classical_lvalue_oracle(f, 1, twist_disc=QI.disc, prec=PREC)
    with mpmath.workdps(30):
        expected = -untwisted.value * twisted.value / (2 * mpmath.pi) ** 2
        assert mpmath.almosteq(combined.value, expected, rel_eps=mpmath.mpf(10) ** -18)
    assert combined.label == "11a/K-1"


def test_weight_four_critical_values():
    f = load_newform("5.4.a")
    for s in (1, 2, 3):
        value = classical_lvalue_oracle(f, s, prec=PREC)
        assert value.abs_error < mpmath.mpf(10) ** -10 * max(abs(value.value), 1)


def test_term_count_grows_with_level():
    assert oracle_terms(11, PREC, 1) < oracle_terms(176, PREC, 1)


def test_oracle_record():
    record = classical_lvalue_oracle(load_newform("11a"), 1, prec=PREC).to_record()
    assert record["kind"] == "oracle"
    assert record["value"].startswith("0.2538418608")


if __name__ == "__main__":
    test_l_value_of_11a()
    test_central_zero_of_37a()
    test_wrong_root_number_breaks_certificate()
    print("✓ Classical values")
    test_quadratic_twist_root_number()
    test_base_change_factorisation()
    print("✓ Base change factorisation")
