import pytest

from polytrap.errors import (
    FieldMismatch,
    InvalidExtensionDegree,
    NonPrimeModulus,
    ReduciblePolynomial,
    SizeBoundExceeded,
    ZeroArgument,
    ZeroInverse,
)
from polytrap.modfield import (
    euler_phi,
    ext_eval_poly,
    factorize,
    fermat_exponent,
    is_irreducible,
    is_primitive_root,
    is_two_primary,
    make_ext_field,
    mod_inv,
    mod_pow,
    mult_order,
    parse_modulus,
    primes_in_range,
    subgroup_generated,
    two_adic_valuation,
)
from polytrap.poly import parse


@pytest.mark.parametrize("a,e,p,expected", [(2, 3, 7, 1), (5, 0, 7, 1), (0, 0, 5, 1), (3, 4, 5, 1), (3, 5, 7, 5)])
def test_mod_pow(a, e, p, expected):
    assert mod_pow(a, e, p) == expected


def test_mod_inv():
    assert mod_inv(3, 7) == 5
    assert mod_inv(2, 5) == 3
    assert mod_inv(1, 13) == 1
    with pytest.raises(ZeroInverse):
        mod_inv(0, 7)


def test_mult_order():
    assert mult_order(2, 7) == 3
    assert mult_order(2, 11) == 10
    assert mult_order(1, 13) == 1
    with pytest.raises(ZeroArgument):
        mult_order(0, 7)
    with pytest.raises(NonPrimeModulus):
        mult_order(2, 9)


def test_primitive_roots():
    assert is_primitive_root(2, 11)
    assert is_primitive_root(2, 13)
    assert not is_primitive_root(2, 7)
    assert not is_primitive_root(1, 5)


def test_two_primary():
    assert is_two_primary(8)
    assert is_two_primary(1)
    assert not is_two_primary(12)


def test_fermat_exponent():
    assert fermat_exponent(17) == 4
    assert fermat_exponent(257) == 8
    assert fermat_exponent(3) == 1
    assert fermat_exponent(11) is None


def test_number_theory_helpers():
    assert primes_in_range(2, 30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_in_range(2, 199)) == 46
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert two_adic_valuation(48) == 4
    assert subgroup_generated(2, 7) == frozenset({1, 2, 4})


def test_gf4_default_modulus():
    field = make_ext_field(2, 2)
    assert field.modulus == (1, 1, 1)
    assert str(field.generator_t()) == "t"


def test_gf_p_degenerate_extension():
    field = make_ext_field(3, 1)
    assert field.size == 3
    assert field.modulus == (0, 1)


def test_reducible_modulus_rejected():
    with pytest.raises(ReduciblePolynomial):
        make_ext_field(2, 2, (1, 0, 1))
    assert not is_irreducible((1, 0, 1), 2)
    assert is_irreducible((1, 1, 1), 2)


def test_field_size_bound():
    with pytest.raises(SizeBoundExceeded):
        make_ext_field(2, 21)


def test_gf4_arithmetic():
    field = make_ext_field(2, 2)
    w = field.generator_t()
    assert w * w == w + field.one()
    assert (w + w).is_zero()
    assert w.inverse() * w == field.one()
    assert w.order() == 3
    assert ext_eval_poly(parse("x^2*y + x*y^2", 2), (field.one(), w)) == field.one()


def test_field_mismatch():
    a = make_ext_field(2, 2).one()
    b = make_ext_field(3, 2).one()
    with pytest.raises(FieldMismatch):
        a + b


def test_parse_modulus():
    assert parse_modulus("t^2+t+1", 2, 2) == (1, 1, 1)
    assert make_ext_field(3, 2, parse_modulus("t^2+1", 3, 2)).size == 9


def test_order_divides_group_order():
    for p in primes_in_range(2, 199):
        for a in range(1, p):
            m = mult_order(a, p)
            assert (p - 1) % m == 0
            assert mod_pow(a, m, p) == 1


def test_primitive_root_count_is_phi():
    for p in primes_in_range(2, 97):
        count = sum(1 for a in range(1, p) if is_primitive_root(a, p))
        assert count == euler_phi(p - 1), p


def test_extension_degree_must_be_positive():
    with pytest.raises(InvalidExtensionDegree):
        make_ext_field(2, 0)
    with pytest.raises(InvalidExtensionDegree):
        make_ext_field(3, -1)
