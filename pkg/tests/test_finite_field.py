import itertools

import numpy as np
import pytest

from solkit.finite_field import (
    FieldError,
    field_create,
    field_for_order,
    field_inv,
    field_mul,
    is_irreducible,
    least_irreducible,
)


def brute_irreducible(poly, p):
    """A monic polynomial of degree <= 3 is irreducible iff it has no root; for
    higher degree we fall back to trial division by every monic polynomial."""
    deg = len(poly) - 1
    if deg <= 3:
        return all(sum(c * x**i for i, c in enumerate(poly)) % p for x in range(p))
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            rem = list(poly)
            for i in range(len(rem) - 1, d - 1, -1):
                c = rem[i] % p
                for j in range(d + 1):
                    rem[i - d + j] = (rem[i - d + j] - c * divisor[j]) % p
            if not any(rem[:d]):
                return False
    return True


def test_prime_field_has_no_modulus():
    F = field_create(7, 1)
    assert F.order == 7
    assert F.modulus is None


@pytest.mark.parametrize("p,deg", [(2, 2), (2, 3), (2, 4), (2, 5), (2, 7), (3, 2), (3, 3), (3, 5)])
def test_modulus_is_least_irreducible(p, deg):
    expected = None
    # product() yields (c0, ..., c_{n-1}) in lexicographic order from c0 upward
    for low in itertools.product(range(p), repeat=deg):
        poly = list(low) + [1]
        if brute_irreducible(poly, p):
            expected = poly
            break
    F = field_create(p, deg)
    assert list(F.modulus) == expected
    assert is_irreducible(list(F.modulus), p)


def test_known_moduli():
    # 1 + x^2 + x^3 precedes 1 + x + x^3 when compared from the constant term up
    assert tuple(least_irreducible(2, 3)) == (1, 0, 1, 1)
    assert tuple(field_create(2, 3).modulus) == (1, 0, 1, 1)
    assert tuple(field_create(3, 3).modulus) == (1, 0, 2, 1)


def test_idempotent_construction():
    assert field_create(3, 3) is field_create(3, 3)
    assert tuple(field_create(2, 5).modulus) == tuple(field_create(2, 5).modulus)


def test_errors():
    with pytest.raises(FieldError):
        field_create(4, 1)
    with pytest.raises(FieldError):
        field_create(2, 21)


def test_gf7_arithmetic():
    F = field_create(7)
    assert field_mul(F(3), F(5)) == F(1)
    assert field_inv(F(3)) == F(5)
    assert field_inv(F(1)) == F(1)
    with pytest.raises(ZeroDivisionError):
        field_inv(F(0))


def long_division_reduce(coeffs, modulus, p):
    coeffs = list(coeffs)
    d = len(modulus) - 1
    for i in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[i] % p
        for j in range(d + 1):
            coeffs[i - d + j] = (coeffs[i - d + j] - c * modulus[j]) % p
    return [c % p for c in coeffs[:d]]


def test_gf8_x_times_x_squared():
    F = field_create(2, 3)
    x, x2 = F.code([0, 1, 0]), F.code([0, 0, 1])
    assert F.coeffs(F.mul_codes(x, x2)) == long_division_reduce([0, 0, 0, 1], list(F.modulus), 2)


def test_gf8_inverse_by_scan():
    F = field_create(2, 3)
    x = F.code([0, 1, 0])
    scan = [e for e in range(1, 8) if F.mul_codes(x, e) == 1]
    assert scan == [F.inv_code(x)]


@pytest.mark.parametrize("q", [4, 7, 8, 9, 13, 16, 27, 31, 32, 81, 128, 243])
def test_group_laws_exhaustive(q):
    F = field_for_order(q)
    nz = np.arange(1, q)
    for a in range(1, q):
        assert F.pow_code(a, q - 1) == 1
        inv = F.inv_code(a)
        assert F.mul_codes(a, inv) == 1 and F.inv_code(inv) == a
    # the multiplicative group is cyclic
    g = F.primitive_element()
    powers = {F.pow_code(g.code, k) for k in range(q - 1)}
    assert powers == set(nz.tolist())


@pytest.mark.parametrize("q", [8, 9, 27])
def test_ring_axioms(q):
    F = field_for_order(q)
    for a, b, c in itertools.product(range(q), repeat=3):
        if (a * 7 + b * 3 + c) % 5:
            continue
        assert F.mul_codes(a, b) == F.mul_codes(b, a)
        assert F.mul_codes(a, F.mul_codes(b, c)) == F.mul_codes(F.mul_codes(a, b), c)
        assert F.mul_codes(a, F.add_codes(b, c)) == F.add_codes(F.mul_codes(a, b), F.mul_codes(a, c))


def test_mismatched_fields():
    with pytest.raises(ValueError):
        field_mul(field_create(2, 3)(1), field_create(3, 1)(1))
