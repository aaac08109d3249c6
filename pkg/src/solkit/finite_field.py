"""Exact arithmetic in GF(p) and GF(p^n).

Elements are integer-coded: the coefficient vector (c_0, ..., c_{n-1}) of the
polynomial representative maps to sum(c_i * p**i).  Prime-field elements are
just their residues.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import isprime

SIZE_CAP = 2**20
TABLE_CAP = 2**13


class FieldError(ValueError):
    pass


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m (coefficients low to high)."""
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    out = [c % p for c in a[:dm]]
    return out + [0] * (dm - len(out))


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _divides(f: list[int], g: list[int], p: int) -> bool:
    """True when the monic polynomial f divides g."""
    return not any(_poly_mod(g, f, p))


def is_irreducible(poly: list[int], p: int) -> bool:
    """Exhaustive factor search; fine for the small degrees used here."""
    n = len(poly) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if _divides(list(low) + [1], poly, p):
                return False
    return True


def least_irreducible(p: int, degree: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible, comparing c_0, c_1, ... in turn."""
    # product() tuples are (c_0, ..., c_{n-1}) in lexicographic order already
    for low in itertools.product(range(p), repeat=degree):
        poly = list(low) + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {degree} over GF({p})")


class FiniteField:
    """GF(characteristic ** degree) with a canonical modulus.

    Fields of order up to 2**13 carry full addition, multiplication, negation
    and inversion tables indexed by element code.
    """

    def __init__(self, characteristic: int, degree: int = 1):
        if not isprime(characteristic):
            raise FieldError(f"characteristic {characteristic} is not prime")
        if degree < 1:
            raise FieldError("degree must be positive")
        if degree > 1 and characteristic not in (2, 3):
            raise FieldError("extension fields are only supported in characteristic 2 or 3")
        order = characteristic**degree
        if order > SIZE_CAP:
            raise FieldError(f"field order {order} exceeds cap {SIZE_CAP}")
        self.characteristic = characteristic
        self.degree = degree
        self.order = order
        self.modulus = least_irreducible(characteristic, degree) if degree > 1 else None
        self._weights = [characteristic**i for i in range(degree)]
        self.add_table = self.mul_table = self.neg_table = self.inv_table = None
        if order <= TABLE_CAP:
            self._build_tables()

    # -- coding ---------------------------------------------------------------
    def coeffs(self, code: int) -> list[int]:
        p = self.characteristic
        out = []
        for _ in range(self.degree):
            code, r = divmod(code, p)
            out.append(r)
        return out

    def code(self, coeffs) -> int:
        coeffs = list(coeffs)
        coeffs += [0] * (self.degree - len(coeffs))
        return sum(c % self.characteristic * w for c, w in zip(coeffs, self._weights))

    # -- scalar arithmetic on codes -------------------------------------------
    def add_codes(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return int(self.add_table[a, b])
        p = self.characteristic
        if self.degree == 1:
            return (a + b) % p
        return self.code(x + y for x, y in zip(self.coeffs(a), self.coeffs(b)))

    def neg_code(self, a: int) -> int:
        if self.degree == 1:
            return (-a) % self.characteristic
        return self.code(-c for c in self.coeffs(a))

    def mul_codes(self, a: int, b: int) -> int:
        if self.mul_table is not None:
            return int(self.mul_table[a, b])
        p = self.characteristic
        if self.degree == 1:
            return a * b % p
        prod = _poly_mul(self.coeffs(a), self.coeffs(b), p)
        return self.code(_poly_mod(prod, list(self.modulus), p))

    def inv_code(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.inv_table is not None:
            return int(self.inv_table[a])
        p = self.characteristic
        if self.degree == 1:
            return pow(a, p - 2, p)
        return self.code(_poly_inverse(self.coeffs(a), list(self.modulus), p))

    def pow_code(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv_code(a), -e
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul_codes(result, base)
            base = self.mul_codes(base, base)
            e >>= 1
        return result

    def _build_tables(self):
        q, p = self.order, self.characteristic
        dtype = np.uint8 if q <= 256 else np.uint16
        r = np.arange(q, dtype=np.int64)
        if self.degree == 1:
            self.add_table = ((r[:, None] + r[None, :]) % q).astype(dtype)
            self.mul_table = ((r[:, None] * r[None, :]) % q).astype(dtype)
        else:
            add = np.zeros((q, q), dtype=np.int64)
            for i, w in enumerate(self._weights):
                digit = (r // w) % p
                add += ((digit[:, None] + digit[None, :]) % p) * w
            self.add_table = add.astype(dtype)
            # log/exp tables from a primitive element
            gen = self.primitive_element().code
            exp = np.empty(2 * (q - 1), dtype=np.int64)
            x = 1
            for k in range(q - 1):
                exp[k] = x
                x = self.mul_codes(x, gen)
            exp[q - 1:] = exp[: q - 1]
            log = np.zeros(q, dtype=np.int64)
            log[exp[: q - 1]] = np.arange(q - 1)
            mul = exp[log[:, None] + log[None, :]]
            mul[0, :] = 0
            mul[:, 0] = 0
            self.mul_table = mul.astype(dtype)
        self.neg_table = np.array([self.neg_code(a) for a in range(q)], dtype=dtype)
        inv = np.zeros(q, dtype=dtype)
        rows, cols = np.nonzero(self.mul_table == 1)
        inv[rows] = cols
        self.inv_table = inv

    # -- element-level API ------------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, int):
            if self.degree == 1:
                return FieldElement(self, value % self.characteristic)
            if not 0 <= value < self.order:
                raise FieldError(f"code {value} out of range for GF({self.order})")
            return FieldElement(self, value)
        return FieldElement(self, self.code(value))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self):
        return [FieldElement(self, c) for c in range(self.order)]

    def primitive_element(self) -> "FieldElement":
        """Smallest-code generator of the multiplicative group."""
        n = self.order - 1
        primes = [d for d in range(2, n + 1) if n % d == 0 and isprime(d)]
        for c in range(1, self.order):
            if all(self.pow_code(c, n // r) != 1 for r in primes):
                return FieldElement(self, c)
        raise FieldError("no primitive element found")

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and self.characteristic == other.characteristic
            and self.degree == other.degree
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.characteristic, self.degree, self.modulus))

    def __repr__(self):
        if self.modulus is None:
            return f"GF({self.order})"
        return f"GF({self.characteristic}^{self.degree}, modulus={list(self.modulus)})"


def _poly_inverse(a: list[int], m: list[int], p: int) -> list[int]:
    """Extended Euclid: the inverse of a modulo the irreducible m."""

    def trim(f):
        f = [c % p for c in f]
        while len(f) > 1 and f[-1] == 0:
            f.pop()
        return f

    def sub(f, g):
        n = max(len(f), len(g))
        f = f + [0] * (n - len(f))
        g = g + [0] * (n - len(g))
        return trim([x - y for x, y in zip(f, g)])

    def divmod_poly(f, g):
        f = trim(f)
        g = trim(g)
        inv_lead = pow(g[-1], p - 2, p)
        quot = [0] * max(1, len(f) - len(g) + 1)
        while len(f) >= len(g) and any(f):
            shift = len(f) - len(g)
            c = f[-1] * inv_lead % p
            quot[shift] = c
            f = sub(f, [0] * shift + [c * x for x in g])
            if len(f) < len(g):
                break
        return trim(quot), f

    r0, r1 = trim(m), trim(a)
    s0, s1 = [0], [1]
    while any(r1):
        quot, rem = divmod_poly(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, sub(s0, _poly_mul(quot, s1, p))
    # r0 is a nonzero constant
    c = pow(r0[0], p - 2, p)
    return [x * c % p for x in s0]


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    code: int

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return self.field(other)
        if other.field != self.field:
            raise FieldError("operands belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.add_codes(self.code, other.code))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_code(self.code))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.mul_codes(self.code, other.code))

    __rmul__ = __mul__

    def inverse(self):
        return FieldElement(self.field, self.field.inv_code(self.code))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow_code(self.code, e))

    def __bool__(self):
        return self.code != 0

    @property
    def coeffs(self) -> list[int]:
        return self.field.coeffs(self.code)

    def __repr__(self):
        return f"{self.field!r}({self.code})"


@lru_cache(maxsize=None)
def field_create(characteristic: int, degree: int = 1) -> FiniteField:
    return FiniteField(characteristic, degree)


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def field_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def field_for_order(q: int) -> FiniteField:
    """The canonical field with q elements (q a prime power)."""
    from sympy import factorint

    factors = factorint(q)
    if len(factors) != 1:
        raise FieldError(f"{q} is not a prime power")
    (p, n), = factors.items()
    return field_create(p, n)
