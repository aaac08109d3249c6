from fractions import Fraction

import numpy as np
import pytest

from solkit import conjectures as cj
from solkit.groups import GroupSpec
from solkit.solubilizer import SolubilizerRecord

from conftest import group, records

TARGETS = ["psl2:4", "psl2:7", "psl2:8", "psl2:13", "psl2:17", "psl3:3", "psl2:11"]


@pytest.mark.parametrize("spec", TARGETS)
def test_all_scanners_pass(spec):
    results = cj.run_scanners(group(spec), list(records(spec)))
    assert [r.name for r in results if not r.passed] == []


def fake(size, k=3, order=60, norm=3, rep=5):
    return SolubilizerRecord(0, rep, k, 1, norm, np.arange(size), order)


def test_violations_carry_witnesses():
    res = cj.scan_normalizer_divides([fake(10, norm=4)])
    assert not res.passed and res.witnesses[0]["normalizer_order"] == 4
    res = cj.scan_prime_power_sizes([fake(27)])
    assert not res.passed and res.witnesses[0]["kind"] == "odd-prime-power"
    over, eq, non_inv = cj.scan_probability_bounds(GroupSpec.parse("psl2:7"), [fake(40, k=3, order=60)])
    assert not over.passed and not non_inv.passed
    _, eq, _ = cj.scan_probability_bounds(GroupSpec.parse("psl2:7"), [fake(36, k=2, order=60)])
    assert not eq.passed


def test_identity_skipped():
    over, eq, non_inv = cj.scan_probability_bounds(GroupSpec.parse("psl2:4"), [fake(60, k=1, rep=0)])
    assert over.passed and non_inv.passed


def test_above_half_values():
    assert cj.ABOVE_HALF["psl3:3"] == Fraction(2832, 5616)
    for spec in ["psl2:4", "psl2:7", "psl3:3"]:
        assert cj.scan_above_half(group(spec).spec, list(records(spec))).passed


@pytest.mark.parametrize(
    "spec,k,expected",
    [("psl2:8", 9, True), ("psl2:8", 3, True), ("psl2:8", 7, False), ("psl2:8", 2, False),
     ("psl2:27", 14, True), ("psl2:27", 2, False), ("psl2:23", 6, True), ("psl2:23", 3, False),
     ("psl2:23", 23, True), ("psl2:7", 4, False), ("sz:8", 13, True), ("sz:8", 5, True), ("sz:8", 7, False),
     ("psl3:3", 13, True), ("psl3:3", 8, False)],
)
def test_sol_equals_normalizer_prediction(spec, k, expected):
    assert cj.predicts_sol_is_normalizer(GroupSpec.parse(spec), k) is expected


def test_power_of_two_prediction():
    # 127 = 2^7 - 1 with 7 = 3 mod 4 is the first Mersenne case
    assert cj.predicts_power_of_two(GroupSpec.parse("psl2:127"), 16)
    assert not cj.predicts_power_of_two(GroupSpec.parse("psl2:127"), 128)
    assert not cj.predicts_power_of_two(GroupSpec.parse("psl2:7"), 4)
    assert not cj.predicts_power_of_two(GroupSpec.parse("psl2:31"), 16)  # not minimal simple


@pytest.mark.parametrize(
    "spec,eulerian",
    [("psl2:4", True), ("psl2:8", True), ("psl2:13", True), ("psl2:7", False), ("psl2:23", False),
     ("psl3:3", False), ("psl2:27", True), ("sz:8", True), ("psl2:43", False), ("psl2:47", False)],
)
def test_eulerian_prediction(spec, eulerian):
    assert cj.predicts_eulerian(GroupSpec.parse(spec)) is eulerian


def test_eulerian_prediction_absent_for_non_minimal():
    assert cj.predicts_eulerian(GroupSpec.parse("psl2:11")) is None
