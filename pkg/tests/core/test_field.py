import pytest

from diffcipher.core.field import (
    FieldElem,
    FieldError,
    FieldOp,
    PrimeField,
    ff_arith,
    ff_element_order,
    is_irreducible,
    is_primitive,
    order_of_t,
)


@pytest.mark.parametrize("p", [0, 1, 4, 15, 2**31])
def test_prime_field_rejects_bad_moduli(p):
    with pytest.raises(FieldError):
        PrimeField(p)


def test_prime_field_accepts_largest_prime_below_bound():
    assert PrimeField(2**31 - 1).p == 2**31 - 1


def test_field_arithmetic_mod_7():
    gf7 = PrimeField(7)
    a, b = gf7(3), gf7(5)
    assert int(a + b) == 1
    assert int(a - b) == 5
    assert int(a * b) == 1
    assert int(a / b) == 2
    assert int(-a) == 4
    assert int(a**6) == 1
    assert int(a**-1) == 5


def test_ff_arith_dispatches_on_operation():
    a = FieldElem(3, 7)
    assert ff_arith(a, FieldElem(4, 7), FieldOp.ADD) == FieldElem(0, 7)
    assert ff_arith(a, 2, "mul") == FieldElem(6, 7)
    assert ff_arith(a, 3, "pow") == FieldElem(6, 7)
    assert ff_arith(a, FieldElem(3, 7), "div") == FieldElem(1, 7)


def test_division_by_zero_raises():
    with pytest.raises(FieldError):
        ff_arith(FieldElem(3, 7), 0, "div")
    with pytest.raises(FieldError):
        FieldElem(0, 5).inverse()


def test_mismatched_moduli_raise():
    with pytest.raises(FieldError):
        FieldElem(1, 5) + FieldElem(1, 7)


def test_elements_must_be_residues():
    with pytest.raises(FieldError):
        FieldElem(7, 7)


def test_prime_field_element_orders():
    assert ff_element_order(FieldElem(1, 7)) == 1
    assert ff_element_order(FieldElem(2, 7)) == 3
    assert ff_element_order(FieldElem(3, 7)) == 6
    with pytest.raises(FieldError):
        ff_element_order(FieldElem(0, 7))


def test_extension_element_orders():
    # t in GF(2)[t]/(t^4 + t + 1) is primitive; t^4 + t^3 + t^2 + t + 1 divides t^5 - 1
    assert ff_element_order([0, 1], p=2, modulus=[1, 1, 0, 0, 1]) == 15
    assert ff_element_order([0, 1], p=2, modulus=[1, 1, 1, 1, 1]) == 5
    with pytest.raises(FieldError):
        ff_element_order([0, 1], p=2, modulus=[1, 0, 0, 0, 1])


def test_irreducibility_and_primitivity():
    assert is_irreducible([1, 1, 1], 2)
    assert not is_irreducible([1, 0, 1], 2)
    assert is_primitive([1, 1, 0, 0, 1], 2)
    assert not is_primitive([1, 1, 1, 1, 1], 2)
    assert not is_primitive([1, 0, 0, 0, 1], 2)


def test_order_of_t_for_reducible_polynomials():
    # t^64 - 1 = (t + 1)^64 over GF(2)
    assert order_of_t([1] + [0] * 63 + [1], 2) == 64
    assert order_of_t([1, 1, 0, 0, 1], 2) == 15
    # (t^2 + t + 1)(t + 1) = t^3 + 1
    assert order_of_t([1, 0, 0, 1], 2) == 3


def test_order_of_t_rejects_non_units():
    with pytest.raises(FieldError):
        order_of_t([0, 1, 1], 2)
