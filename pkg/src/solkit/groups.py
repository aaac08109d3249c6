"""Finite matrix groups, fully enumerated and indexed.

Every element gets an integer index.  The identity is index 0 and the
remaining elements follow in increasing order of their packed matrix key
(row-major entry codes, most significant first), so the enumeration order is
reproducible across runs.  All bulk operations take and return numpy index
arrays.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import factorint, isprime

from .finite_field import FiniteField, field_for_order

log = logging.getLogger(__name__)

ORDER_CAP = 2**16
# Cayley tables are int16 (indices < 32768) and cost 2*N^2 bytes.
TABLE_LIMIT = 10_000

FAMILIES = ("psl2", "psl3", "psl4", "sz")


class GroupSpecError(ValueError):
    pass


def _prime_power(q: int) -> tuple[int, int] | None:
    f = factorint(q)
    if len(f) != 1:
        return None
    (p, n), = f.items()
    return p, n


@dataclass(frozen=True)
class GroupSpec:
    family: str
    q: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GroupSpecError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        pp = _prime_power(self.q) if self.q > 1 else None
        if pp is None:
            raise GroupSpecError(f"field order {self.q} is not a prime power")
        p, n = pp
        if self.family == "psl2":
            if self.q < 4:
                raise GroupSpecError("psl2 needs q >= 4")
            if n > 1 and p not in (2, 3):
                raise GroupSpecError("psl2 over an extension field needs characteristic 2 or 3")
        elif self.family == "psl3" and self.q != 3:
            raise GroupSpecError("psl3 is only supported for q = 3")
        elif self.family == "psl4" and self.q != 2:
            raise GroupSpecError("psl4 is only supported for q = 2")
        elif self.family == "sz" and not (p == 2 and n % 2 == 1 and isprime(n)):
            raise GroupSpecError("sz needs q = 2^p with p an odd prime")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        try:
            family, q = text.strip().lower().split(":")
            return cls(family, int(q))
        except ValueError as exc:
            if isinstance(exc, GroupSpecError):
                raise
            raise GroupSpecError(f"bad group spec {text!r}; expected e.g. 'psl2:4'") from exc

    def __str__(self):
        return f"{self.family}:{self.q}"

    @property
    def name(self) -> str:
        if self.family == "sz":
            return f"Sz({self.q})"
        return f"PSL({self.family[-1]},{self.q})"

    @property
    def characteristic(self) -> int:
        return _prime_power(self.q)[0]

    @property
    def exponent(self) -> int:
        return _prime_power(self.q)[1]

    @property
    def dimension(self) -> int:
        return {"psl2": 2, "psl3": 3, "psl4": 4, "sz": 4}[self.family]

    @property
    def theoretical_order(self) -> int:
        q = self.q
        if self.family == "psl2":
            return q * (q * q - 1) // math.gcd(2, q - 1)
        if self.family == "psl3":
            return q**3 * (q**2 - 1) * (q**3 - 1) // math.gcd(3, q - 1)
        if self.family == "psl4":
            return q**6 * (q**2 - 1) * (q**3 - 1) * (q**4 - 1) // math.gcd(4, q - 1)
        return q * q * (q * q + 1) * (q - 1)

    @property
    def is_minimal_simple(self) -> bool:
        """Membership in Thompson's list of minimal simple groups."""
        p, n = _prime_power(self.q)
        if self.family == "psl2":
            if p == 2:
                return isprime(n)
            if p == 3:
                return n % 2 == 1 and isprime(n)
            return n == 1 and p > 3 and p % 5 in (2, 3)
        if self.family == "psl3":
            return True
        if self.family == "sz":
            return True
        return False


@dataclass
class ConjugacyClass:
    """One orbit of the conjugation action.

    ``conjugators[i]`` is an element g with members[i] = g^-1 * rep * g.
    """

    index: int
    representative: int
    members: np.ndarray
    conjugators: np.ndarray
    element_order: int
    normalizer_order: int

    @property
    def size(self) -> int:
        return len(self.members)


class Group:
    def __init__(self, spec: GroupSpec, mats: np.ndarray, field_: FiniteField):
        self.spec = spec
        self.field = field_
        self.dim = mats.shape[1]
        self.mats = mats
        self.order = len(mats)
        q = field_.order
        d2 = self.dim * self.dim
        self._weights = np.array([q ** (d2 - 1 - k) for k in range(d2)], dtype=np.int64)
        self.keys = self._pack(mats)
        self._sorted = np.argsort(self.keys, kind="stable")
        self._sorted_keys = self.keys[self._sorted]
        self.table: np.ndarray | None = None
        self._perm_cache: dict[int, np.ndarray] = {}

    # -- matrix level -----------------------------------------------------------
    def _pack(self, mats: np.ndarray) -> np.ndarray:
        flat = mats.reshape(len(mats), -1).astype(np.int64)
        return flat @ self._weights

    def _matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return _matmul(self.field, A, B)

    def canonical_keys(self, mats: np.ndarray) -> np.ndarray:
        return _canonical_keys(self.spec, self.field, mats, self._weights)

    def index_of_keys(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, self.order - 1)
        if not np.array_equal(self._sorted_keys[pos], keys):
            raise KeyError("matrix not in group")
        return self._sorted[pos]

    def index_of_matrix(self, mat) -> int:
        m = np.asarray(mat, dtype=self.mats.dtype).reshape(1, self.dim, self.dim)
        return int(self.index_of_keys(self.canonical_keys(m))[0])

    # -- index level ------------------------------------------------------------
    def mul(self, a, b) -> np.ndarray:
        """Elementwise product of index arrays (broadcasting)."""
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        if self.table is not None:
            return self.table[a, b].astype(np.int64)
        shape = a.shape
        a, b = a.ravel(), b.ravel()
        out = np.empty(len(a), dtype=np.int64)
        step = 1 << 16
        for s in range(0, len(a), step):
            prod = self._matmul(self.mats[a[s:s + step]], self.mats[b[s:s + step]])
            out[s:s + step] = self.index_of_keys(self.canonical_keys(prod))
        return out.reshape(shape)

    def right_mul_perm(self, g: int) -> np.ndarray:
        """perm[i] = index of element_i * g, cached per g."""
        perm = self._perm_cache.get(g)
        if perm is None:
            perm = self.mul(np.arange(self.order), g)
            if len(self._perm_cache) > 64:
                self._perm_cache.clear()
            self._perm_cache[g] = perm
        return perm

    def conjugate(self, elems, g) -> np.ndarray:
        """g^-1 * e * g for each e."""
        g = np.asarray(g, dtype=np.int64)
        return self.mul(self.mul(self.inv[g], elems), g)

    def commutator(self, a, b) -> np.ndarray:
        """a^-1 b^-1 a b."""
        return self.mul(self.mul(self.inv[a], self.inv[b]), self.mul(a, b))

    def power(self, g: int, k: int) -> int:
        k %= int(self.orders[g])
        result, base = 0, g
        while k:
            if k & 1:
                result = int(self.mul(result, base))
            base = int(self.mul(base, base))
            k >>= 1
        return result

    def cyclic(self, g: int) -> np.ndarray:
        out = [0]
        x = g
        while x != 0:
            out.append(x)
            x = int(self.mul(x, g))
        return np.array(sorted(out), dtype=np.int64)

    def build_table(self):
        """Cayley table via column composition: col(b*s) = col_s[col(b)]."""
        n = self.order
        allc = np.arange(n)
        gen_idx = [self.index_of_matrix(g) for g in generators(self.spec, self.field)]
        gen_cols = [self.mul(allc, g) for g in gen_idx]  # a -> a*s
        table = np.empty((n, n), dtype=np.int16 if n < 2**15 else np.int32)
        table[:, 0] = allc
        done = np.zeros(n, dtype=bool)
        done[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for b in frontier:
                col_b = table[:, b]
                for s, col_s in zip(gen_idx, gen_cols):
                    c = int(col_s[b])
                    if not done[c]:
                        done[c] = True
                        table[:, c] = col_s[col_b]
                        nxt.append(c)
            frontier = nxt
        self.table = table

    # -- derived data -------------------------------------------------------------
    @cached_property
    def _orders_and_inverses(self):
        n = self.order
        elems = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        inv = np.zeros(n, dtype=np.int64)
        orders[0] = 1
        pending = elems[1:]
        cur = pending.copy()
        k = 1
        while len(pending):
            nxt = self.mul(cur, pending)
            done = nxt == 0
            orders[pending[done]] = k + 1
            inv[pending[done]] = cur[done]
            pending, cur = pending[~done], nxt[~done]
            k += 1
        return orders, inv

    @property
    def orders(self) -> np.ndarray:
        return self._orders_and_inverses[0]

    @property
    def inv(self) -> np.ndarray:
        return self._orders_and_inverses[1]

    @cached_property
    def _class_data(self):
        n = self.order
        allg = np.arange(n)
        class_of = np.full(n, -1, dtype=np.int64)
        conjugator = np.zeros(n, dtype=np.int64)
        classes = []
        for rep in range(n):
            if class_of[rep] >= 0:
                continue
            images = self.conjugate(rep, allg)
            members, first = np.unique(images, return_index=True)
            cls = ConjugacyClass(
                index=len(classes),
                representative=rep,
                members=members,
                conjugators=allg[first],
                element_order=int(self.orders[rep]),
                normalizer_order=len(self.cyclic_normalizer(rep)),
            )
            class_of[members] = cls.index
            conjugator[members] = cls.conjugators
            classes.append(cls)
        return classes, class_of, conjugator

    @property
    def classes(self) -> list[ConjugacyClass]:
        return self._class_data[0]

    @property
    def class_of(self) -> np.ndarray:
        return self._class_data[1]

    @property
    def conjugator(self) -> np.ndarray:
        """conjugator[e] = g with e = g^-1 * rep * g, rep the class representative of e."""
        return self._class_data[2]

    @property
    def involution_count(self) -> int:
        return int(np.count_nonzero(self.orders == 2))

    def cyclic_normalizer(self, x: int) -> np.ndarray:
        allg = np.arange(self.order)
        images = self.mul(self.mul(allg, x), self.inv[allg])
        return allg[np.isin(images, self.cyclic(x))]

    def centralizer(self, x: int) -> np.ndarray:
        allg = np.arange(self.order)
        return allg[self.mul(allg, x) == self.mul(x, allg)]

    def matrix(self, idx: int) -> list[list[int]]:
        return self.mats[idx].tolist()

    def __repr__(self):
        return f"Group({self.spec.name}, order={self.order})"


# ---------------------------------------------------------------------------
# batched matrix arithmetic over the field tables


def _matmul(F: FiniteField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if F.degree == 1:
        C = np.einsum("nik,nkj->nij", A.astype(np.int64), B.astype(np.int64)) % F.order
        return C.astype(A.dtype)
    prods = F.mul_table[A[:, :, :, None], B[:, None, :, :]]  # n, i, k, j
    if F.characteristic == 2:
        return np.bitwise_xor.reduce(prods, axis=2).astype(A.dtype)
    C = prods[:, :, 0, :]
    for k in range(1, A.shape[2]):
        C = F.add_table[C, prods[:, :, k, :]]
    return C.astype(A.dtype)


def _canonical_keys(spec: GroupSpec, F: FiniteField, mats: np.ndarray, weights) -> np.ndarray:
    keys = mats.reshape(len(mats), -1).astype(np.int64) @ weights
    if spec.family == "psl2" and F.characteristic != 2:
        neg = F.neg_table[mats].reshape(len(mats), -1).astype(np.int64) @ weights
        keys = np.minimum(keys, neg)
    return keys


def _canonicalize(spec, F, mats, weights):
    if spec.family == "psl2" and F.characteristic != 2:
        neg = F.neg_table[mats]
        k1 = mats.reshape(len(mats), -1).astype(np.int64) @ weights
        k2 = neg.reshape(len(mats), -1).astype(np.int64) @ weights
        return np.where((k2 < k1)[:, None, None], neg, mats)
    return mats


# ---------------------------------------------------------------------------
# generators


def _identity(d, dtype):
    return np.eye(d, dtype=dtype)


def generators(spec: GroupSpec, F: FiniteField) -> list[np.ndarray]:
    d = spec.dimension
    dtype = np.uint8 if F.order <= 256 else np.uint16
    one = 1
    if spec.family == "psl2":
        minus_one = F.neg_code(1)
        w = F.primitive_element().code
        t = np.array([[one, one], [0, one]], dtype=dtype)
        weyl = np.array([[0, one], [minus_one, 0]], dtype=dtype)
        torus = np.array([[w, 0], [0, F.inv_code(w)]], dtype=dtype)
        return [t, weyl, torus]
    if spec.family in ("psl3", "psl4"):
        gens = []
        for i in range(d):
            for j in range(d):
                if i != j:
                    m = _identity(d, dtype)
                    m[i, j] = one
                    gens.append(m)
        return gens
    return _suzuki_generators(spec, F, dtype)


def _suzuki_generators(spec: GroupSpec, F: FiniteField, dtype) -> list[np.ndarray]:
    """Lower unitriangular S(a, b), a torus element and the antidiagonal involution.

    q = 2^(2m+1), theta: x -> x^(2^(m+1)) so that theta^2 is the Frobenius map.
    """
    m = (spec.exponent - 1) // 2
    theta = 2 ** (m + 1)
    add, mul, pw = F.add_codes, F.mul_codes, F.pow_code

    def S(a, b):
        a_t, b_t = pw(a, theta), pw(b, theta)
        r30 = add(add(pw(a, 2 + theta), mul(a, b)), b_t)
        r31 = add(pw(a, 1 + theta), b)
        return np.array(
            [[1, 0, 0, 0], [a, 1, 0, 0], [b, a_t, 1, 0], [r30, r31, a, 1]], dtype=dtype
        )

    lam = F.primitive_element().code
    e = 2**m
    torus = np.diag(
        [pw(lam, 1 + e), pw(lam, e), pw(lam, -e), pw(lam, -1 - e)]
    ).astype(dtype)
    anti = np.fliplr(np.eye(4, dtype=dtype))
    return [S(1, 0), S(0, 1), torus, anti]


def build_group(spec: GroupSpec | str, table: bool | None = None) -> Group:
    """Enumerate the group by breadth-first closure of the standard generators."""
    if isinstance(spec, str):
        spec = GroupSpec.parse(spec)
    expected = spec.theoretical_order
    if expected > ORDER_CAP:
        raise GroupSpecError(f"{spec.name} has order {expected} > cap {ORDER_CAP}")
    F = field_for_order(spec.q)
    d = spec.dimension
    gens = np.stack(generators(spec, F))
    q = F.order
    weights = np.array([q ** (d * d - 1 - k) for k in range(d * d)], dtype=np.int64)
    gens = _canonicalize(spec, F, gens, weights)
    ident = _identity(d, gens.dtype)[None]
    seen_keys = _canonical_keys(spec, F, ident, weights)
    all_mats = [ident]
    frontier = ident
    while len(frontier):
        n = len(frontier)
        A = np.repeat(frontier, len(gens), axis=0)
        B = np.tile(gens, (n, 1, 1))
        prod = _canonicalize(spec, F, _matmul(F, A, B), weights)
        keys = _canonical_keys(spec, F, prod, weights)
        keys, first = np.unique(keys, return_index=True)
        fresh = ~np.isin(keys, seen_keys)
        frontier = prod[first[fresh]]
        seen_keys = np.concatenate([seen_keys, keys[fresh]])
        all_mats.append(frontier)
        if len(seen_keys) > ORDER_CAP:
            raise GroupSpecError(f"closure of {spec.name} generators exceeded {ORDER_CAP}")
    mats = np.concatenate(all_mats)
    keys = _canonical_keys(spec, F, mats, weights)
    rest = np.argsort(keys[1:], kind="stable") + 1
    mats = np.concatenate([mats[:1], mats[rest]])
    if len(mats) != expected:
        raise GroupSpecError(f"{spec.name}: enumerated {len(mats)} elements, expected {expected}")
    group = Group(spec, mats, F)
    if table if table is not None else group.order <= TABLE_LIMIT:
        group.build_table()
    log.info("built %s with %d elements", spec.name, group.order)
    return group


def element_order(group: Group, idx: int) -> int:
    return int(group.orders[idx])


def conjugacy_classes(group: Group) -> list[ConjugacyClass]:
    return group.classes


def count_involutions(group: Group) -> int:
    return group.involution_count


def cyclic_normalizer(group: Group, idx: int) -> np.ndarray:
    return group.cyclic_normalizer(idx)
