"""Executable scanners for the corollaries and open conjectures on solubilizers.

Every scanner returns a ScanResult holding its verdict and any witnesses.
The identity is skipped wherever a statement is only meaningful for x != 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import isprime

from .groups import Group, GroupSpec
from .solubilizer import SolubilizerRecord, is_prime_power_size


@dataclass
class ScanResult:
    name: str
    passed: bool
    witnesses: list = field(default_factory=list)
    note: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "witnesses": self.witnesses, "note": self.note}


def _witness(rec: SolubilizerRecord, **extra):
    return {"class_index": rec.class_index, "element_order": rec.element_order, "sol_size": rec.size, **extra}


def scan_normalizer_divides(records) -> ScanResult:
    bad = [_witness(r, normalizer_order=r.normalizer_order) for r in records if r.size % r.normalizer_order]
    return ScanResult("|N_G(<x>)| divides |Sol(x)|", not bad, bad)


def scan_prime_power_sizes(records) -> ScanResult:
    bad = []
    for r in records:
        kind = is_prime_power_size(r.size)
        if kind in ("p", "p^2", "odd-prime-power"):
            bad.append(_witness(r, kind=kind))
    return ScanResult("|Sol(x)| is never p, p^2 or an odd prime power", not bad, bad)


THREE_FIFTHS = Fraction(3, 5)
HALF = Fraction(1, 2)


def scan_probability_bounds(spec: GroupSpec, records) -> list[ScanResult]:
    over, equal_elsewhere, non_invol = [], [], []
    for r in records:
        if r.representative == 0:
            continue
        ps = r.probability
        if ps > THREE_FIFTHS:
            over.append(_witness(r, probability=str(ps)))
        if ps == THREE_FIFTHS and not (str(spec) == "psl2:4" and r.element_order == 2):
            equal_elsewhere.append(_witness(r, probability=str(ps)))
        if r.element_order != 2 and ps >= HALF:
            non_invol.append(_witness(r, probability=str(ps)))
    return [
        ScanResult("P_S(x) <= 3/5", not over, over),
        ScanResult("P_S(x) = 3/5 only for involutions of PSL(2,4)", not equal_elsewhere, equal_elsewhere),
        ScanResult("P_S(x) < 1/2 for non-involutions", not non_invol, non_invol),
    ]


# the three minimal simple groups with an element of P_S > 1/2
ABOVE_HALF = {"psl2:4": Fraction(3, 5), "psl2:7": Fraction(11, 21), "psl3:3": Fraction(59, 117)}


def scan_above_half(spec: GroupSpec, records) -> ScanResult:
    """P_S(x) > 1/2 exactly for the involutions of A5, PSL(2,7), PSL(3,3)."""
    if not spec.is_minimal_simple:
        return ScanResult("P_S(x) > 1/2 classification", True, [], "not applicable: not minimal simple")
    bad = []
    for r in records:
        if r.representative == 0:
            continue
        predicted = r.element_order == 2 and str(spec) in ABOVE_HALF
        observed = r.probability > HALF
        if predicted != observed or (predicted and r.probability != ABOVE_HALF[str(spec)]):
            bad.append(_witness(r, probability=str(r.probability)))
    return ScanResult("P_S(x) > 1/2 classification", not bad, bad)


def predicts_sol_is_normalizer(spec: GroupSpec, k: int) -> bool:
    q = spec.q
    if k == 1:
        return False
    if spec.family == "psl2":
        if spec.characteristic == 2:
            return (q + 1) % k == 0
        if spec.characteristic == 3 and spec.exponent > 1:
            return (q + 1) % k == 0 and k != 2
        return k == q or ((q + 1) % k == 0 and k > 4)
    if spec.family == "sz":
        n = spec.exponent
        plus, minus = 2**n + 2 ** ((n + 1) // 2) + 1, 2**n - 2 ** ((n + 1) // 2) + 1
        return plus % k == 0 or minus % k == 0
    if spec.family == "psl3":
        return k == 13
    return False


def scan_sol_equals_normalizer(group: Group, records) -> ScanResult:
    if not group.spec.is_minimal_simple:
        return ScanResult("Sol(x) = N_G(<x>) classification", True, [], "not applicable: not minimal simple")
    bad = []
    for r in records:
        if r.representative == 0:
            continue
        norm = group.cyclic_normalizer(r.representative)
        observed = len(norm) == r.size and np.array_equal(np.sort(norm), r.members)
        if observed != predicts_sol_is_normalizer(group.spec, r.element_order):
            bad.append(_witness(r, observed=observed))
    return ScanResult("Sol(x) = N_G(<x>) classification", not bad, bad)


def predicts_power_of_two(spec: GroupSpec, k: int) -> bool:
    if spec.family != "psl2" or not spec.is_minimal_simple or spec.exponent != 1:
        return False
    p = spec.q
    n = (p + 1).bit_length() - 1
    if 2**n - 1 != p or n % 4 != 3 or n <= 3:
        return False
    m = k.bit_length() - 1
    return 2**m == k and 2 < m < n


def scan_power_of_two(spec: GroupSpec, records) -> ScanResult:
    bad = []
    for r in records:
        if r.representative == 0:
            continue
        observed = is_prime_power_size(r.size) == "power-of-two" or r.size in (2, 4)
        predicted = predicts_power_of_two(spec, r.element_order)
        if spec.is_minimal_simple and observed != predicted:
            bad.append(_witness(r))
    note = "" if spec.is_minimal_simple else "informational: not minimal simple"
    return ScanResult("|Sol(x)| = 2^n classification", not bad, bad, note)


def predicts_eulerian(spec: GroupSpec) -> bool | None:
    if not spec.is_minimal_simple:
        return None
    if spec.family == "psl3":
        return False
    if spec.family == "psl2" and spec.exponent == 1 and isprime(spec.q) and spec.q % 20 in (3, 7):
        return False
    return True


def scan_eulerian(spec: GroupSpec, records) -> ScanResult:
    predicted = predicts_eulerian(spec)
    odd = [_witness(r) for r in records if r.size % 2]
    observed = not odd
    if predicted is None:
        return ScanResult("Eulerian classification", True, odd, f"informational: eulerian={observed}")
    return ScanResult("Eulerian classification", observed == predicted, odd, f"eulerian={observed}")


def run_scanners(group: Group, records: list[SolubilizerRecord]) -> list[ScanResult]:
    spec = group.spec
    results = [scan_normalizer_divides(records), scan_prime_power_sizes(records)]
    results += scan_probability_bounds(spec, records)
    results.append(scan_above_half(spec, records))
    results.append(scan_sol_equals_normalizer(group, records))
    results.append(scan_power_of_two(spec, records))
    results.append(scan_eulerian(spec, records))
    return results
