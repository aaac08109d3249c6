"""Subgroup generation, derived series and structural fingerprints."""
from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .groups import Group

# bound on B*N for the batched visited bitmap
_VISITED_BUDGET = 1 << 25


@dataclass
class ClosureBatch:
    sizes: np.ndarray
    aborted: np.ndarray
    members: list  # sorted index arrays, None where aborted


def _mul_by_column(group: Group, elems: np.ndarray, col: np.ndarray) -> np.ndarray:
    if len(col) and (col == col[0]).all():
        return group.right_mul_perm(int(col[0]))[elems]
    return group.mul(elems, col)


def closure_many(group: Group, gens, threshold: int | None = None) -> ClosureBatch:
    """Generate <gens[i]> for every row i at once.

    A row is abandoned (``aborted``) as soon as its subgroup is known to have
    more than ``threshold`` elements.
    """
    gens = np.atleast_2d(np.asarray(gens, dtype=np.int64))
    B = len(gens)
    n = group.order
    limit = n if threshold is None else threshold
    chunk = max(1, _VISITED_BUDGET // n)
    if B > chunk:
        parts = [closure_many(group, gens[s:s + chunk], threshold) for s in range(0, B, chunk)]
        return ClosureBatch(
            np.concatenate([p.sizes for p in parts]),
            np.concatenate([p.aborted for p in parts]),
            [m for p in parts for m in p.members],
        )
    k = gens.shape[1]
    visited = np.zeros(B * n, dtype=bool)
    pid = np.arange(B)
    elem = np.zeros(B, dtype=np.int64)
    visited[pid * n] = True
    sizes = np.ones(B, dtype=np.int64)
    aborted = np.zeros(B, dtype=bool)
    while len(pid):
        found = []
        for j in range(k):
            prod = _mul_by_column(group, elem, gens[pid, j])
            found.append(pid * n + prod)
        flat = np.concatenate(found)
        flat = np.unique(flat[~visited[flat]])
        visited[flat] = True
        owner = flat // n
        sizes += np.bincount(owner, minlength=B)
        aborted |= sizes > limit
        keep = ~aborted[owner]
        pid, elem = owner[keep], flat[keep] % n
    grid = visited.reshape(B, n)
    members = [None if aborted[i] else np.flatnonzero(grid[i]) for i in range(B)]
    return ClosureBatch(sizes, aborted, members)


def generated(group: Group, gens) -> np.ndarray:
    """Sorted member indices of the subgroup generated by ``gens``."""
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    gens = gens[gens != 0]
    if len(gens) == 0:
        return np.zeros(1, dtype=np.int64)
    return closure_many(group, gens[None, :]).members[0]


@dataclass
class ClosureResult:
    members: np.ndarray | None  # sorted, None when aborted
    size: int
    aborted: bool

    @property
    def completed(self) -> bool:
        return not self.aborted


def closure(group: Group, gens, abort_threshold: int | None = None) -> ClosureResult:
    """<gens>, abandoned once it is known to exceed ``abort_threshold`` elements."""
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    gens = gens[gens != 0]
    if len(gens) == 0:
        return ClosureResult(np.zeros(1, dtype=np.int64), 1, False)
    batch = closure_many(group, gens[None, :], abort_threshold)
    return ClosureResult(batch.members[0], int(batch.sizes[0]), bool(batch.aborted[0]))


def is_subgroup(group: Group, members) -> bool:
    h = np.unique(np.asarray(members, dtype=np.int64))
    if len(h) == 0 or h[0] != 0:
        return False
    if len(h) <= 2048:
        prods = group.mul(h[:, None], h[None, :])
        return bool(np.isin(prods, h).all())
    # large sets: closed iff the subgroup a greedy generating set spans is the set itself
    try:
        small_generators(group, h)
    except ValueError:
        return False
    return True


def small_generators(group: Group, members: np.ndarray, candidates=None) -> list[int]:
    """Greedy generating set: keep each candidate not already generated."""
    members = np.asarray(members, dtype=np.int64)
    pool = members if candidates is None else np.asarray(candidates, dtype=np.int64)
    # prefer elements of large order, they generate more per step
    pool = pool[np.argsort(-group.orders[pool], kind="stable")]
    gens: list[int] = []
    current = np.zeros(1, dtype=np.int64)
    for g in pool:
        if len(current) == len(members):
            break
        if g == 0 or _contains(current, g):
            continue
        gens.append(int(g))
        current = generated(group, gens)
    if len(current) != len(members) or not np.array_equal(current, np.sort(members)):
        raise ValueError("candidate set does not generate the given subgroup")
    return gens


def _contains(sorted_arr: np.ndarray, g) -> bool:
    i = np.searchsorted(sorted_arr, g)
    return i < len(sorted_arr) and sorted_arr[i] == g


def normal_closure(group: Group, seeds, ambient_gens) -> tuple[np.ndarray, list[int]]:
    """Smallest subgroup containing ``seeds`` normalized by ``ambient_gens``."""
    gens = sorted({int(s) for s in np.atleast_1d(seeds) if s != 0})
    members = generated(group, gens)
    changed = True
    while changed:
        changed = False
        for h in ambient_gens:
            conj = group.conjugate(np.asarray(gens, dtype=np.int64), h) if gens else np.zeros(0, np.int64)
            outside = [int(c) for c in conj if not _contains(members, c)]
            if outside:
                gens.append(outside[0])
                members = generated(group, gens)
                changed = True
    return members, gens


def derived_subgroup(group: Group, members: np.ndarray, gens=None) -> tuple[np.ndarray, list[int]]:
    """H' as the normal closure in H of the commutators of a generating set of H."""
    if gens is None:
        gens = small_generators(group, members)
    if not gens:
        return np.zeros(1, dtype=np.int64), []
    g = np.asarray(gens, dtype=np.int64)
    comms = np.unique(group.commutator(g[:, None], g[None, :]))
    derived, dgens = normal_closure(group, comms, gens)
    if dgens:
        dgens = small_generators(group, derived, dgens)
    return derived, dgens


def derived_series(group: Group, members, gens=None) -> list[np.ndarray]:
    """H = H0 > H1 > ... ending at the trivial group or at a perfect term."""
    members = np.sort(np.asarray(members, dtype=np.int64))
    series = [members]
    if gens is None:
        gens = small_generators(group, members)
    while len(series[-1]) > 1:
        nxt, gens = derived_subgroup(group, series[-1], gens)
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def derived_length(group: Group, members, gens=None) -> int | None:
    """Derived length, or None for an insoluble subgroup."""
    series = derived_series(group, members, gens)
    if len(series[-1]) > 1:
        return None
    return len(series) - 1


def derived_series_soluble(group: Group, members) -> tuple[bool, int | None]:
    """(soluble, derived length); the length is None for an insoluble subgroup."""
    if not is_subgroup(group, members):
        raise ValueError("members are not closed under multiplication")
    length = derived_length(group, members)
    return length is not None, length


_solubility_cache: dict[tuple, bool] = {}


def is_soluble(group: Group, members, gens=None) -> bool:
    members = np.sort(np.asarray(members, dtype=np.int64))
    key = (id(group), len(members), hashlib.blake2b(members.tobytes(), digest_size=16).digest())
    hit = _solubility_cache.get(key)
    if hit is None:
        hit = derived_length(group, members, gens) is not None
        _solubility_cache[key] = hit
    return hit


@dataclass(frozen=True)
class Fingerprint:
    order: int
    order_histogram: tuple
    is_abelian: bool
    derived_length: int | None

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "order_histogram": {str(k): v for k, v in self.order_histogram},
            "is_abelian": self.is_abelian,
            "derived_length": self.derived_length,
        }


def order_histogram(group: Group, members) -> tuple:
    counts = Counter(group.orders[np.asarray(members, dtype=np.int64)].tolist())
    return tuple(sorted(counts.items()))


def fingerprint(group: Group, members) -> Fingerprint:
    members = np.sort(np.asarray(members, dtype=np.int64))
    gens = small_generators(group, members)
    g = np.asarray(gens, dtype=np.int64)
    abelian = bool((group.mul(g[:, None], g[None, :]) == group.mul(g[None, :], g[:, None])).all())
    return Fingerprint(
        order=len(members),
        order_histogram=order_histogram(group, members),
        is_abelian=abelian,
        derived_length=derived_length(group, members, gens),
    )
