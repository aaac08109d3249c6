"""Exhaustive solubilizer sets Sol_G(x) = {y : <x, y> soluble}.

Sol is computed once per conjugacy class.  For a representative x the
candidates y are split into orbits of the group generated by

* conjugation by N_G(<x>),
* left multiplication y -> x*y,
* inversion y -> y^-1,

each of which preserves the subgroup <x, y> up to conjugation by an element
normalizing <x>, so solubility is constant on an orbit and only one member
per orbit needs a closure.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy import factorint

from .groups import Group, GroupSpec
from .subgroups import (
    _contains,
    generated,
    closure_many,
    derived_length,
    fingerprint,
    is_soluble,
    small_generators,
)

log = logging.getLogger(__name__)

MODES = ("shortcut", "general")
BATCH = 256


class ModeError(ValueError):
    pass


def proper_subgroup_bound(spec: GroupSpec) -> int:
    """An upper bound on the order of any proper subgroup of G.

    Uses the largest maximal subgroup of each family; Lagrange's |G|/2 caps it.
    """
    q = spec.q
    order = spec.theoretical_order
    if spec.family == "psl2":
        d = math.gcd(2, q - 1)
        bound = max(q * (q - 1) // d, 2 * (q + 1) // d, 60)
    elif spec.family == "psl3":
        bound = 432
    elif spec.family == "psl4":
        bound = 2520
    else:
        bound = q * q * (q - 1)
    return min(bound, order // 2)


def _check_mode(group: Group, mode: str):
    if mode not in MODES:
        raise ModeError(f"mode must be one of {MODES}")
    if mode == "shortcut" and not group.spec.is_minimal_simple:
        raise ModeError(f"shortcut mode needs a minimal simple group; {group.spec.name} is not")


def is_pair_soluble(group: Group, x: int, y: int, mode: str = "shortcut") -> bool:
    return bool(pairs_soluble(group, np.array([[x, y]]), mode)[0])


def pairs_soluble(group: Group, pairs: np.ndarray, mode: str = "shortcut") -> np.ndarray:
    """Vectorized solubility verdicts for rows (x, y)."""
    verdicts, _ = _pairs_soluble_with_members(group, pairs, mode)
    return verdicts


def _pairs_soluble_with_members(group: Group, pairs, mode):
    _check_mode(group, mode)
    pairs = np.atleast_2d(np.asarray(pairs, dtype=np.int64))
    if mode == "shortcut":
        threshold = proper_subgroup_bound(group.spec)
    else:
        threshold = group.order // 2
    batch = closure_many(group, pairs, threshold)
    verdicts = ~batch.aborted & (batch.sizes < group.order)
    if mode == "general":
        for i in np.flatnonzero(verdicts):
            verdicts[i] = is_soluble(group, batch.members[i])
    members = [m if v else None for m, v in zip(batch.members, verdicts)]
    return verdicts, members


# ---------------------------------------------------------------------------


@dataclass
class SolubilizerRecord:
    class_index: int
    representative: int
    element_order: int
    class_size: int
    normalizer_order: int
    members: np.ndarray
    group_order: int
    is_subgroup: bool = False
    is_soluble: bool = False
    soluble_closures: list = field(default_factory=list, repr=False)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def probability(self) -> Fraction:
        return Fraction(self.size, self.group_order)

    def summary(self) -> dict:
        return {
            "class_index": self.class_index,
            "representative": self.representative,
            "element_order": self.element_order,
            "class_size": self.class_size,
            "normalizer_order": self.normalizer_order,
            "sol_size": self.size,
            "probability": str(self.probability),
            "is_subgroup": self.is_subgroup,
            "is_soluble": self.is_soluble,
        }


def _orbit_labels(group: Group, x: int) -> np.ndarray:
    n = group.order
    allg = np.arange(n)
    norm = group.cyclic_normalizer(x)
    norm_gens = small_generators(group, norm)
    targets = [group.conjugate(allg, c) for c in norm_gens]
    targets.append(group.mul(x, allg))
    targets.append(group.inv)
    rows = np.tile(allg, len(targets))
    cols = np.concatenate(targets)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def solubilizer_set(group: Group, x: int, mode: str = "shortcut") -> tuple[np.ndarray, list]:
    """Sol_G(x) as a sorted index array plus the distinct soluble <x, y> found."""
    _check_mode(group, mode)
    n = group.order
    if x == 0:
        return np.arange(n), []
    labels = _orbit_labels(group, x)
    n_orbits = labels.max() + 1
    reps = np.full(n_orbits, n, dtype=np.int64)
    np.minimum.at(reps, labels, np.arange(n))
    status = np.zeros(n_orbits, dtype=np.int8)  # 0 unknown, 1 soluble, -1 not
    closures: dict[bytes, np.ndarray] = {}
    order = np.argsort(reps)
    for s in range(0, n_orbits, BATCH):
        block = order[s:s + BATCH]
        block = block[status[block] == 0]
        if not len(block):
            continue
        pairs = np.stack([np.full(len(block), x), reps[block]], axis=1)
        verdicts, members = _pairs_soluble_with_members(group, pairs, mode)
        status[block[~verdicts]] = -1
        for m in members:
            if m is None:
                continue
            key = m.tobytes()
            if key not in closures:
                closures[key] = m
                # everything inside a soluble <x, y> is in Sol(x)
                status[labels[m]] = 1
    sol = np.flatnonzero(status[labels] == 1)
    return sol, list(closures.values())


def is_subgroup_set(group: Group, members: np.ndarray) -> bool:
    size = len(members)
    if group.order % size:
        return False
    current = np.zeros(1, dtype=np.int64)
    gens: list[int] = []
    pool = members[np.argsort(-group.orders[members], kind="stable")]
    for g in pool:
        if len(current) == size:
            break
        if _contains(current, g):
            continue
        gens.append(int(g))
        current = generated(group, gens)
        if len(current) > size or not np.isin(current, members).all():
            return False
    return len(current) == size


def solubilizer(group: Group, class_index: int, mode: str = "shortcut") -> SolubilizerRecord:
    cls = group.classes[class_index]
    x = cls.representative
    members, closures = solubilizer_set(group, x, mode)
    rec = SolubilizerRecord(
        class_index=class_index,
        representative=x,
        element_order=cls.element_order,
        class_size=cls.size,
        normalizer_order=cls.normalizer_order,
        members=members,
        group_order=group.order,
        soluble_closures=closures,
    )
    rec.is_subgroup = is_subgroup_set(group, members)
    if rec.is_subgroup:
        rec.is_soluble = derived_length(group, members) is not None
    return rec


def default_mode(group: Group) -> str:
    return "shortcut" if group.spec.is_minimal_simple else "general"


def all_records(group: Group, mode: str | None = None, classes=None) -> list[SolubilizerRecord]:
    mode = mode or default_mode(group)
    idx = range(len(group.classes)) if classes is None else classes
    out = []
    for i in idx:
        rec = solubilizer(group, i, mode)
        log.info("%s class %d (order %d): |Sol| = %d", group.spec.name, i, rec.element_order, rec.size)
        out.append(rec)
    return out


def sol_of(group: Group, records: list[SolubilizerRecord], g: int) -> np.ndarray:
    """Sol(g) = c^-1 Sol(rep) c where g = c^-1 rep c."""
    by_class = {r.class_index: r for r in records}
    rec = by_class[int(group.class_of[g])]
    c = int(group.conjugator[g])
    return np.sort(group.conjugate(rec.members, c))


def solubilizer_probability(record: SolubilizerRecord, group_order: int) -> Fraction:
    return Fraction(record.size, group_order)


def is_prime_power_size(size: int) -> str:
    """One of 'p', 'p^2', 'odd-prime-power', 'power-of-two', 'none'.

    The first matching label wins, so 3 is 'p' and 9 is 'p^2'.
    """
    if size < 1:
        raise ValueError("size must be positive")
    f = factorint(size)
    if len(f) != 1:
        return "none"
    (p, e), = f.items()
    if e == 1:
        return "p"
    if e == 2:
        return "p^2"
    return "power-of-two" if p == 2 else "odd-prime-power"


# ---------------------------------------------------------------------------
# maximal soluble overgroups


def _grow(group: Group, base: np.ndarray, sol: np.ndarray, mode: str) -> np.ndarray:
    """Greedily enlarge a soluble subgroup inside Sol(x) until nothing more fits."""
    current = base
    gens = small_generators(group, current)
    while True:
        outside = sol[~np.isin(sol, current)]
        if not len(outside):
            return current
        rows = np.array([gens + [int(z)] for z in outside], dtype=np.int64)
        if mode == "shortcut":
            batch = closure_many(group, rows, proper_subgroup_bound(group.spec))
            ok = ~batch.aborted & (batch.sizes < group.order)
        else:
            batch = closure_many(group, rows, group.order // 2)
            ok = ~batch.aborted
            for i in np.flatnonzero(ok):
                ok[i] = is_soluble(group, batch.members[i])
        if not ok.any():
            return current
        best = int(np.flatnonzero(ok)[np.argmax(batch.sizes[ok])])
        current = batch.members[best]
        gens = gens + [int(outside[best])]


def _conjugates_containing(group: Group, M: np.ndarray, x: int) -> list[np.ndarray]:
    """All conjugates of M that contain x (x any element, not only a class rep)."""
    cls = int(group.class_of[x])
    in_class = M[group.class_of[M] == cls]
    cx = group.centralizer(x)
    # h = c^-1 r c and x = d^-1 r d  =>  x = (c^-1 d)^-1 h (c^-1 d)
    d = int(group.conjugator[x])
    found: dict[bytes, np.ndarray] = {}
    for h in in_class:
        t = int(group.mul(group.inv[int(group.conjugator[h])], d))
        base = group.conjugate(M, t)
        for z in cx:
            conj = np.sort(group.conjugate(base, z))
            key = conj.tobytes()
            if key not in found:
                found[key] = conj
    return list(found.values())


@dataclass
class OvergroupSearch:
    """Shared state: representatives of every class of maximal soluble subgroup seen so far."""

    group: Group
    mode: str
    class_reps: list = field(default_factory=list)

    def overgroups(self, x: int, sol: np.ndarray, candidates: list) -> list[np.ndarray]:
        group = self.group
        known: dict[bytes, np.ndarray] = {}

        def absorb(M):
            for conj in _conjugates_containing(group, M, x):
                known.setdefault(conj.tobytes(), conj)

        for M in self.class_reps:
            absorb(M)
        for C in sorted(candidates, key=len, reverse=True):
            if any(_subset(C, K) for K in known.values()):
                continue
            M = _grow(group, C, sol, self.mode)
            self.class_reps.append(M)
            absorb(M)
        # drop anything that ended up inside a bigger one
        result = [K for K in known.values() if not any(len(L) > len(K) and _subset(K, L) for L in known.values())]
        return sorted(result, key=lambda m: (-len(m), m.tobytes()))


def _subset(a: np.ndarray, b: np.ndarray) -> bool:
    return len(a) <= len(b) and bool(np.isin(a, b, assume_unique=True).all())


def maximal_soluble_overgroups(
    group: Group,
    x: int,
    record: SolubilizerRecord | None = None,
    search: OvergroupSearch | None = None,
) -> list[np.ndarray]:
    """Maximal soluble subgroups of G containing x (for minimal simple G: the maximal subgroups)."""
    if x == 0:
        raise ValueError("x must not be the identity")
    mode = search.mode if search else default_mode(group)
    if record is None or record.representative != x:
        sol, candidates = solubilizer_set(group, x, mode)
    else:
        sol, candidates = record.members, record.soluble_closures
    search = search or OvergroupSearch(group, mode)
    return search.overgroups(x, sol, candidates)


def all_overgroups(group: Group, records: list[SolubilizerRecord], mode: str | None = None) -> dict:
    """Overgroups for every non-identity class, sharing discovered classes across runs.

    A second pass re-runs classes processed before later discoveries.
    """
    search = OvergroupSearch(group, mode or default_mode(group))
    out = {}
    for _ in range(2):
        before = len(search.class_reps)
        for rec in records:
            if rec.representative == 0:
                continue
            out[rec.class_index] = search.overgroups(rec.representative, rec.members, rec.soluble_closures)
        if len(search.class_reps) == before:
            break
    return out


def intersection_tally(group: Group, overgroups: list[np.ndarray]) -> dict:
    """Fingerprint of every pairwise intersection, tallied."""
    tally: dict = {}
    if len(overgroups) == 1:
        fp = fingerprint(group, overgroups[0])
        return {fp: 1}
    for i in range(len(overgroups)):
        for j in range(i + 1, len(overgroups)):
            inter = np.intersect1d(overgroups[i], overgroups[j], assume_unique=True)
            fp = fingerprint(group, inter)
            tally[fp] = tally.get(fp, 0) + 1
    return tally


# ---------------------------------------------------------------------------
# axioms


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def verify_solubilizer_axioms(
    group: Group,
    records: list[SolubilizerRecord],
    overgroups: dict | None = None,
    exhaustive_limit: int = 1092,
) -> list[Check]:
    checks: list[Check] = []
    for rec in records:
        x = rec.representative
        tag = f"class {rec.class_index} (order {rec.element_order})"
        checks.append(Check(f"{tag}: |x| divides |Sol|", rec.size % rec.element_order == 0, f"{rec.size}"))
        norm = group.cyclic_normalizer(x)
        missing = norm[~np.isin(norm, rec.members)]
        checks.append(
            Check(
                f"{tag}: N(<x>) inside Sol",
                len(missing) == 0,
                f"witness {int(missing[0])}" if len(missing) else "",
            )
        )
        if rec.is_subgroup and rec.is_soluble and x != 0:
            if overgroups is not None and rec.class_index in overgroups:
                ovs = overgroups[rec.class_index]
                ok = len(ovs) == 1 and np.array_equal(ovs[0], rec.members)
            else:
                # any soluble K containing x lies in Sol(x), so a soluble subgroup Sol is maximal soluble
                ok = True
            checks.append(Check(f"{tag}: soluble subgroup Sol is maximal soluble", ok))
    reps = [r.representative for r in records]
    asym = None
    for r1 in records:
        for r2 in records:
            a = _contains(r1.members, r2.representative)
            b = _contains(r2.members, r1.representative)
            if a != b:
                asym = (r1.representative, r2.representative)
    checks.append(Check("symmetry on class representatives", asym is None, f"witness {asym}" if asym else ""))
    if group.order <= exhaustive_limit and len(records) == len(group.classes):
        ok, witness = _exhaustive_symmetry(group, records)
        checks.append(Check("symmetry on all pairs", ok, witness))
    checks.append(
        Check(
            "some Sol is not a subgroup",
            any(not r.is_subgroup for r in records) or len(records) < len(group.classes),
            "",
        )
    )
    return checks


def membership_matrix(group: Group, records: list[SolubilizerRecord]) -> np.ndarray:
    """Boolean |G| x |G| matrix A[g, y] = (y in Sol(g))."""
    n = group.order
    by_class = {r.class_index: r for r in records}
    A = np.zeros((n, n), dtype=bool)
    for cls in group.classes:
        rec = by_class[cls.index]
        for m, c in zip(cls.members, cls.conjugators):
            A[m, group.conjugate(rec.members, int(c))] = True
    return A


def _exhaustive_symmetry(group, records) -> tuple[bool, str]:
    A = membership_matrix(group, records)
    bad = np.argwhere(A != A.T)
    if len(bad):
        i, j = bad[0]
        return False, f"witness ({int(i)}, {int(j)})"
    return True, ""
