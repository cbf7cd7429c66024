import pytest
from hypothesis import given, strategies as st

from ultraortho.gf import (
    FieldError,
    field_of_order,
    gf_add,
    gf_enumerate,
    gf_inv,
    gf_make,
    gf_mul,
    gf_neg,
    is_irreducible,
    is_prime,
    least_irreducible,
    prime_power,
)

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


def elems(q):
    F = field_of_order(q)
    return st.integers(0, q - 1).map(F.elem)


def poly_mulmod(a, b, mod, p):
    """Schoolbook product of coefficient tuples (highest degree first) mod ``mod``."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    m = len(mod) - 1
    while len(prod) > m:
        lead = prod[0]
        for i in range(len(mod)):
            prod[i] = (prod[i] - lead * mod[i]) % p
        prod.pop(0)
    return tuple([0] * (m - len(prod)) + prod)


def test_primes_and_prime_powers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_power(27) == (3, 3)
    assert prime_power(2) == (2, 1)
    for bad in (1, 6, 12, 0):
        with pytest.raises(FieldError):
            prime_power(bad)


def test_known_moduli():
    assert least_irreducible(2, 2) == (1, 1, 1)
    assert least_irreducible(2, 3) == (1, 0, 1, 1)
    assert least_irreducible(3, 2) == (1, 0, 1)
    assert is_irreducible((1, 0, 0, 1, 1), 2)
    assert not is_irreducible((1, 0, 1), 2)  # x^2 + 1 = (x+1)^2


@pytest.mark.parametrize("q", ORDERS)
def test_multiplication_matches_polynomial_arithmetic(q):
    F = field_of_order(q)
    for a in gf_enumerate(F):
        for b in gf_enumerate(F):
            assert gf_mul(a, b).rep == poly_mulmod(a.rep, b.rep, F.modulus, F.p)


@pytest.mark.parametrize("q", ORDERS)
def test_frobenius_and_cyclic_group(q):
    F = field_of_order(q)
    orders = set()
    for a in gf_enumerate(F)[1:]:
        assert a ** q == a
        e, x = 1, a
        while x != F.one():
            x, e = x * a, e + 1
        orders.add(e)
    assert max(orders) == q - 1


@pytest.mark.parametrize("q", [4, 9, 27])
@given(data=st.data())
def test_field_axioms(q, data):
    a, b, c = (data.draw(elems(q)) for _ in range(3))
    F = a.spec
    assert gf_add(a, b) == gf_add(b, a)
    assert gf_mul(a, b) == gf_mul(b, a)
    assert gf_mul(a, gf_add(b, c)) == gf_add(gf_mul(a, b), gf_mul(a, c))
    assert gf_add(gf_add(a, b), c) == gf_add(a, gf_add(b, c))
    assert gf_mul(gf_mul(a, b), c) == gf_mul(a, gf_mul(b, c))
    assert gf_add(a, gf_neg(a)) == F.zero()
    if a:
        assert gf_mul(a, gf_inv(a)) == F.one()
        assert (b / a) * a == b


def test_errors():
    with pytest.raises(FieldError):
        gf_make(4)
    with pytest.raises(FieldError):
        gf_make(2, 0)
    with pytest.raises(FieldError):
        gf_make(2, 20)
    with pytest.raises(ZeroDivisionError):
        gf_inv(field_of_order(5).zero())
    with pytest.raises(FieldError):
        field_of_order(4).one() + field_of_order(2).one()


def test_index_rep_roundtrip_and_order():
    F = field_of_order(9)
    reps = [a.rep for a in gf_enumerate(F)]
    assert reps == sorted(reps)
    assert all(F.index_of(F.rep_of(i)) == i for i in range(9))


def test_spec_cache_and_equality():
    assert gf_make(3, 2) is gf_make(3, 2)
    assert field_of_order(8) == gf_make(2, 3)
    assert field_of_order(8) != field_of_order(9)
