"""Closed-form predictions for solubilizers in the minimal simple groups.

Each table is plain data: rows are maximal-subgroup types (with an order
formula and a structural kind used to recognise them), columns are element
cases, and every cell is a formula string evaluated exactly over Fractions.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .groups import Group, GroupSpec
from .subgroups import order_histogram


class NotCovered(LookupError):
    """No closed form applies to this group or class."""


# -- exact formula evaluation ------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def evaluate(expr: str, **env) -> int:
    """Evaluate an arithmetic formula exactly; the result must be an integer."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise KeyError(f"unbound variable {node.id!r} in {expr!r}")
            return Fraction(env[node.id])
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ValueError(f"unsupported syntax in formula {expr!r}")

    value = ev(ast.parse(expr, mode="eval"))
    if value.denominator != 1:
        raise ValueError(f"formula {expr!r} is not integral at {env}: {value}")
    return int(value)


def counting_lemma(m: int, r: int, n: int) -> int:
    """Number of conjugates of M containing x: m*r/n."""
    if n <= 0 or (m * r) % n:
        raise ValueError(f"{m}*{r} is not divisible by {n}; the counting hypotheses fail")
    return m * r // n


# -- tables ----------------------------------------------------------------------


@dataclass(frozen=True)
class Row:
    label: str
    order: str
    kind: str = "any"  # 'dihedral', 'A4', 'S4' or 'any'


@dataclass(frozen=True)
class Column:
    counts: tuple
    sol: str
    # allowed pairwise intersections as (structure, order formula); None = not stated
    intersections: tuple | None = None


@dataclass(frozen=True)
class Table:
    name: str
    rows: tuple
    columns: dict


_EVEN_Q = Table(
    "PSL(2,2^p)",
    (Row("C2^p:C(q-1)", "q*(q-1)"), Row("D(2(q-1))", "2*(q-1)", "dihedral"), Row("D(2(q+1))", "2*(q+1)", "dihedral")),
    {
        "invol": Column(("1", "q/2", "q/2"), "3*q*(q-1)", (("cyclic", "2"),)),
        "div(q-1)": Column(("2", "1", "0"), "2*q*(q-1)", (("cyclic", "q-1"),)),
        "div(q+1)": Column(("0", "0", "1"), "2*(q+1)", ()),
    },
)

_CHAR_THREE = Table(
    "PSL(2,3^p)",
    (
        Row("C3^p:C((q-1)/2)", "q*(q-1)/2"),
        Row("D(q-1)", "q-1", "dihedral"),
        Row("D(q+1)", "q+1", "dihedral"),
        Row("A4", "12", "A4"),
    ),
    {
        "invol": Column(("0", "(q+1)/2", "(q+3)/2", "(q+1)/4"), "q*(q+1)", (("cyclic", "2"), ("klein", "4"))),
        "3": Column(("1", "0", "0", "q/3"), "q*(q+5)/2", (("cyclic", "3"),)),
        "div(q-1)": Column(("2", "1", "0", "0"), "q*(q-1)", (("cyclic", "(q-1)/2"),)),
        "div(q+1)": Column(("0", "0", "1", "0"), "q+1", ()),
    },
)


def _prime_table(residue, counts, sols, small):
    rows = (
        Row("Cp:C((p-1)/2)", "p*(p-1)/2"),
        Row("D(p-1)", "p-1", "dihedral"),
        Row("D(p+1)", "p+1", "dihedral"),
        Row(small, "24" if small == "S4" else "12", small),
    )
    cols = {}
    for name, cnt, sol in zip(("invol", "3", "4"), counts, sols):
        if cnt is not None:
            cols[name] = Column(cnt, sol)
    cols["p"] = Column(("1", "0", "0", "0"), "p*(p-1)/2")
    cols["div(p-1)"] = Column(("2", "1", "0", "0"), "p*(p-1)")
    cols["div(p+1)"] = Column(("0", "0", "1", "0"), "p+1")
    return Table(f"PSL(2,p), p = {residue} mod 24", rows, cols)


_PRIME_TABLES = {
    1: _prime_table(
        1,
        [("2", "(p+1)/2", "(p-1)/2", "3*(p-1)/4"), ("2", "1", "0", "(p-1)/3"), ("2", "1", "0", "(p-1)/4")],
        ["(p-1)*(2*p+3)", "(p-1)*(p+6)", "(p-1)*(p+4)"],
        "S4",
    ),
    5: _prime_table(
        5,
        [("2", "(p+1)/2", "(p-1)/2", "(p-1)/4"), ("0", "0", "1", "(p+1)/3"), None],
        ["(p-1)*(2*p-1)", "4*(p+1)", None],
        "A4",
    ),
    7: _prime_table(
        7,
        [("0", "(p+1)/2", "(p+3)/2", "3*(p+1)/4"), ("2", "1", "0", "(p-1)/3"), ("0", "0", "1", "(p+1)/4")],
        ["(p+1)*(p+4)", "(p-1)*(p+6)", "5*(p+1)"],
        "S4",
    ),
    11: _prime_table(
        11,
        [("0", "(p+1)/2", "(p+3)/2", "(p+1)/4"), ("0", "0", "1", "(p+1)/3"), None],
        ["p*(p+1)", "4*(p+1)", None],
        "A4",
    ),
    13: _prime_table(
        13,
        [("2", "(p+1)/2", "(p-1)/2", "(p-1)/4"), ("2", "1", "0", "(p-1)/3"), None],
        ["(p-1)*(2*p-1)", "(p-1)*(p+3)", None],
        "A4",
    ),
    17: _prime_table(
        17,
        [("2", "(p+1)/2", "(p-1)/2", "3*(p-1)/4"), ("0", "0", "1", "(p+1)/3"), ("2", "1", "0", "(p-1)/4")],
        ["(p-1)*(2*p+3)", "7*(p+1)", "(p-1)*(p+4)"],
        "S4",
    ),
    19: _prime_table(
        19,
        [("0", "(p+1)/2", "(p+3)/2", "(p+1)/4"), ("2", "1", "0", "(p-1)/3"), None],
        ["p*(p+1)", "(p-1)*(p+3)", None],
        "A4",
    ),
    23: _prime_table(
        23,
        [("0", "(p+1)/2", "(p+3)/2", "3*(p+1)/4"), ("0", "0", "1", "(p+1)/3"), ("0", "0", "1", "(p+1)/4")],
        ["(p+1)*(p+4)", "7*(p+1)", "5*(p+1)"],
        "S4",
    ),
}

_SUZUKI = Table(
    "Sz(2^p)",
    (
        Row("(C2^p.C2^p):C(q-1)", "q*q*(q-1)"),
        Row("D(2(q-1))", "2*(q-1)", "dihedral"),
        Row("C(q+):C4", "4*qp"),
        Row("C(q-):C4", "4*qm"),
    ),
    {
        "invol": Column(("1", "q*q/2", "q*q/4", "q*q/4"), "q*q*(4*q-3)", (("cyclic", "2"), ("cyclic", "4"))),
        "4": Column(("1", "0", "q/2", "q/2"), "q*q*(q+3)", (("cyclic", "4"),)),
        "div(q-1)": Column(("2", "1", "0", "0"), "2*q*q*(q-1)", (("cyclic", "q-1"),)),
        "div(q+)": Column(("0", "0", "1", "0"), "4*qp", ()),
        "div(q-)": Column(("0", "0", "0", "1"), "4*qm", ()),
    },
)

BIG_LABEL = "(C3^2:Q8):C3"
_PSL33 = Table(
    "PSL(3,3)",
    (Row(BIG_LABEL, "432"), Row("C13:C3", "39"), Row("S4", "24", "S4")),
    {
        "2": Column(("10", "0", "18"), "2832"),
        "3/N18": Column(("2", "6", "3"), "1026"),
        "3/N108": Column(("8", "0", "2"), "2376"),
        "4": Column(("2", "0", "2"), "848"),
        "6": Column(("4", "0", "0"), "1368"),
        "8": Column(("2", "0", "0"), "816"),
        "13": Column(("0", "1", "0"), "39"),
    },
)

# Cells whose tabulated value contradicts the counting lemma and the brute force.
# S4 has one class of elements of order 3, and they lie in the class with
# |N_G(<x>)| = 18 (624 elements): 234 * 8 / 624 = 3.  The N = 108 class (104
# elements) would need 234 * m / 104 = 2, i.e. m = 8/9.  The intersection
# list for this case also has C(8,2) = 28 pairs, all between the 8 large ones.
ERRATA = {
    ("psl3_3", "3/N108", "S4"): (2, 0),
}

PAIR_INTERSECTIONS = {
    "2": [
        (BIG_LABEL, BIG_LABEL, "(C3^2:C3):C2^2", 12),
        (BIG_LABEL, BIG_LABEL, "S3xS3", 20),
        (BIG_LABEL, BIG_LABEL, "GL(2,3)", 13),
        (BIG_LABEL, "S4", "D8", 60),
        (BIG_LABEL, "S4", "C2xC2", 72),
        (BIG_LABEL, "S4", "S3", 48),
        ("S4", "S4", "D8", 15),
        ("S4", "S4", "C2", 96),
        ("S4", "S4", "C2xC2", 18),
        ("S4", "S4", "S3", 24),
    ],
    "3/N18": [
        ("S4", BIG_LABEL, "S3", 6),
        ("S4", "S4", "S3", 3),
        ("S4", "C13:C3", "C3", 18),
        (BIG_LABEL, BIG_LABEL, "(C3^2:C3):C2^2", 1),
        (BIG_LABEL, "C13:C3", "C3", 12),
        ("C13:C3", "C13:C3", "C3", 15),
    ],
    "3/N108": [
        (BIG_LABEL, BIG_LABEL, "GL(2,3)", 9),
        (BIG_LABEL, BIG_LABEL, "(C3^2:C3):C2^2", 7),
        (BIG_LABEL, BIG_LABEL, "S3xS3", 12),
    ],
    "4": [
        (BIG_LABEL, BIG_LABEL, "GL(2,3)", 1),
        (BIG_LABEL, "S4", "D8", 4),
        ("S4", "S4", "D8", 1),
    ],
    "6": [
        (BIG_LABEL, BIG_LABEL, "(C3^2:C3):C2^2", 3),
        (BIG_LABEL, BIG_LABEL, "S3xS3", 2),
        (BIG_LABEL, BIG_LABEL, "GL(2,3)", 1),
    ],
    "8": [(BIG_LABEL, BIG_LABEL, "GL(2,3)", 1)],
    "13": [],
}

# element-order histograms of the intersection types; None = order only
INTERSECTION_TYPES = {
    "(C3^2:C3):C2^2": (108, None),
    "S3xS3": (36, {1: 1, 2: 15, 3: 8, 6: 12}),
    "GL(2,3)": (48, {1: 1, 2: 13, 3: 8, 4: 6, 6: 8, 8: 12}),
    "D8": (8, {1: 1, 2: 5, 4: 2}),
    "C2xC2": (4, {1: 1, 2: 3}),
    "S3": (6, {1: 1, 2: 3, 3: 2}),
    "C2": (2, {1: 1, 2: 1}),
    "C3": (3, {1: 1, 3: 2}),
}


# -- routing ----------------------------------------------------------------------


@dataclass(frozen=True)
class CaseKey:
    family: str  # psl2_2p, psl2_3p, psl2_p, sz, psl3_3
    parameter: int
    column: str
    residue: int | None = None
    normalizer_order: int | None = None


def family_key(spec: GroupSpec) -> str:
    if not spec.is_minimal_simple:
        raise NotCovered(f"{spec.name} is not minimal simple; no closed form")
    if spec.family == "psl2":
        if spec.characteristic == 2:
            return "psl2_2p"
        return "psl2_3p" if spec.characteristic == 3 else "psl2_p"
    if spec.family == "sz":
        return "sz"
    return "psl3_3"


def suzuki_tori(q: int) -> tuple[int, int]:
    r = math.isqrt(2 * q)
    return q + r + 1, q - r + 1


def table_for(key: CaseKey) -> Table:
    if key.family == "psl2_2p":
        return _EVEN_Q
    if key.family == "psl2_3p":
        return _CHAR_THREE
    if key.family == "psl2_p":
        return _PRIME_TABLES[key.residue]
    if key.family == "sz":
        return _SUZUKI
    return _PSL33


def classify_case(group: Group, class_index: int) -> CaseKey:
    spec = group.spec
    fam = family_key(spec)
    cls = group.classes[class_index]
    k = cls.element_order
    q = spec.q
    if k == 1:
        raise NotCovered("the identity is not in any table (Sol(1) = G)")
    if fam == "psl3_3":
        col = str(k)
        if k == 3:
            col = f"3/N{cls.normalizer_order}"
        if col not in _PSL33.columns:
            raise NotCovered(f"no PSL(3,3) column for order {k}, normalizer {cls.normalizer_order}")
        return CaseKey(fam, q, col, normalizer_order=cls.normalizer_order)
    if fam == "sz":
        qp, qm = suzuki_tori(q)
        if k in (2, 4):
            col = "invol" if k == 2 else "4"
        elif (q - 1) % k == 0:
            col = "div(q-1)"
        elif qp % k == 0:
            col = "div(q+)"
        elif qm % k == 0:
            col = "div(q-)"
        else:
            raise NotCovered(f"element order {k} not in the Sz({q}) spectrum")
        return CaseKey(fam, q, col)
    if fam == "psl2_p":
        p = q
        residue = p % 24
        table = _PRIME_TABLES[residue]
        if k == 2:
            col = "invol"
        elif k == 3:
            col = "3"
        elif k == p:
            col = "p"
        elif k == 4 and "4" in table.columns:
            col = "4"
        elif (p - 1) % k == 0:
            col = "div(p-1)"
        elif (p + 1) % k == 0:
            col = "div(p+1)"
        else:
            raise NotCovered(f"element order {k} does not divide p, p-1 or p+1")
        return CaseKey(fam, p, col, residue=residue)
    if k == 2:
        col = "invol"
    elif fam == "psl2_3p" and k == 3:
        col = "3"
    elif (q - 1) % k == 0:
        col = "div(q-1)"
    elif (q + 1) % k == 0:
        col = "div(q+1)"
    else:
        raise NotCovered(f"element order {k} does not divide q-1 or q+1")
    return CaseKey(fam, q, col)


# -- profiles ---------------------------------------------------------------------


@dataclass
class ClosedFormProfile:
    key: CaseKey
    table: str
    counts: dict  # label -> int
    row_orders: dict  # label -> int
    row_kinds: dict
    sol_size: int
    intersections: list | None = None  # [(structure, order)]
    errata: dict = field(default_factory=dict)  # label -> (tabulated, corrected)

    def to_dict(self):
        return {
            "table": self.table,
            "column": self.key.column,
            "counts": dict(self.counts),
            "row_orders": dict(self.row_orders),
            "sol_size": self.sol_size,
            "intersections": self.intersections,
            "errata": {k: list(v) for k, v in self.errata.items()},
        }


def _env(key: CaseKey) -> dict:
    if key.family == "psl2_p":
        return {"p": key.parameter}
    env = {"q": key.parameter}
    if key.family == "sz":
        env["qp"], env["qm"] = suzuki_tori(key.parameter)
    return env


def closed_form_profile(key: CaseKey) -> ClosedFormProfile:
    table = table_for(key)
    try:
        col = table.columns[key.column]
    except KeyError:
        raise NotCovered(f"{table.name} has no column {key.column!r}") from None
    env = _env(key)
    counts, orders, kinds, errata = {}, {}, {}, {}
    for row, cell in zip(table.rows, col.counts):
        value = evaluate(cell, **env)
        fix = ERRATA.get((key.family, key.column, row.label))
        if fix is not None and fix[0] == value:
            errata[row.label] = fix
            value = fix[1]
        counts[row.label] = value
        orders[row.label] = evaluate(row.order, **env)
        kinds[row.label] = row.kind
    inter = None
    if col.intersections is not None:
        inter = [(s, evaluate(o, **env)) for s, o in col.intersections]
    return ClosedFormProfile(key, table.name, counts, orders, kinds, evaluate(col.sol, **env), inter, errata)


def tabulated_counts(key: CaseKey) -> dict:
    """Counts exactly as tabulated, before errata."""
    table = table_for(key)
    env = _env(key)
    return {row.label: evaluate(c, **env) for row, c in zip(table.rows, table.columns[key.column].counts)}


def is_small_parameter(spec: GroupSpec) -> bool:
    """Groups where the maximal-subgroup list behind the tables degenerates."""
    return spec.family == "psl2" and spec.q == 7


# -- recognising overgroups -----------------------------------------------------


def structure_kind(group: Group, members) -> str:
    hist = dict(order_histogram(group, members))
    n = len(members)
    if hist == {1: 1, 2: 3, 3: 8}:
        return "A4"
    if hist == {1: 1, 2: 9, 3: 8, 4: 6}:
        return "S4"
    m = n // 2
    involutions = hist.get(2, 0)
    if n % 2 == 0 and m > 2 and m in hist and involutions == m + (1 if m % 2 == 0 else 0):
        return "dihedral"
    return "other"


def label_overgroup(group: Group, profile: ClosedFormProfile, members) -> str | None:
    n = len(members)
    kind = None
    for label, order in profile.row_orders.items():
        if order != n:
            continue
        want = profile.row_kinds[label]
        if want == "any":
            return label
        kind = kind or structure_kind(group, members)
        if kind == want:
            return label
    return None


def intersection_matches(group: Group, members, allowed) -> bool:
    n = len(members)
    hist = dict(order_histogram(group, members))
    for structure, order in allowed:
        if n != order:
            continue
        if structure == "cyclic" and order in hist:
            return True
        if structure == "klein" and hist == {1: 1, 2: 3}:
            return True
    return False


def identify_intersection(group: Group, members) -> str | None:
    n = len(members)
    hist = dict(order_histogram(group, members))
    for name, (order, want) in INTERSECTION_TYPES.items():
        if order == n and (want is None or want == hist):
            return name
    return None


# -- verification -----------------------------------------------------------------


@dataclass
class CountReport:
    class_index: int
    column: str
    expected: dict
    found: dict
    unlabelled: list
    counts_match: bool
    intersections_match: bool | None
    small_parameter: bool
    errata: dict

    @property
    def status(self) -> str:
        if self.counts_match and self.intersections_match is not False:
            return "match"
        return "warning" if self.small_parameter else "mismatch"

    def to_dict(self):
        return {
            "class_index": self.class_index,
            "column": self.column,
            "expected": self.expected,
            "found": self.found,
            "unlabelled_orders": self.unlabelled,
            "counts_match": self.counts_match,
            "intersections_match": self.intersections_match,
            "small_parameter": self.small_parameter,
            "errata": {k: list(v) for k, v in self.errata.items()},
            "status": self.status,
        }


def verify_maximal_counts(group: Group, class_index: int, profile: ClosedFormProfile, overgroups) -> CountReport:
    found = {label: 0 for label in profile.counts}
    unlabelled = []
    for M in overgroups:
        label = label_overgroup(group, profile, M)
        if label is None:
            unlabelled.append(len(M))
        else:
            found[label] += 1
    counts_ok = found == profile.counts and not unlabelled
    inter_ok = None
    if profile.intersections is not None and len(overgroups) > 1:
        inter_ok = True
        for i in range(len(overgroups)):
            for j in range(i + 1, len(overgroups)):
                inter = np.intersect1d(overgroups[i], overgroups[j], assume_unique=True)
                if not intersection_matches(group, inter, profile.intersections):
                    inter_ok = False
    return CountReport(
        class_index,
        profile.key.column,
        dict(profile.counts),
        found,
        sorted(unlabelled),
        counts_ok,
        inter_ok,
        is_small_parameter(group.spec),
        dict(profile.errata),
    )


def pair_intersection_tally(group: Group, profile: ClosedFormProfile, overgroups) -> dict:
    """{(labelA, labelB, intersection type): count} with labels in a fixed order."""
    rank = {label: i for i, label in enumerate(profile.counts)}
    labels = [label_overgroup(group, profile, M) for M in overgroups]
    tally: dict = {}
    for i in range(len(overgroups)):
        for j in range(i + 1, len(overgroups)):
            a, b = sorted((labels[i], labels[j]), key=lambda s: rank.get(s, 99))
            inter = np.intersect1d(overgroups[i], overgroups[j], assume_unique=True)
            key = (a, b, identify_intersection(group, inter))
            tally[key] = tally.get(key, 0) + 1
    return tally


def expected_pair_intersections(column: str) -> dict:
    rank = {row.label: i for i, row in enumerate(_PSL33.rows)}
    out = {}
    for a, b, t, n in PAIR_INTERSECTIONS[column]:
        a, b = sorted((a, b), key=lambda s: rank[s])
        out[(a, b, t)] = out.get((a, b, t), 0) + n
    return out


def involution_identity_check(group: Group, records) -> tuple[bool, int, int]:
    """|Sol(x)| * |I(G)| against sum over y of |I(Sol(y))|, with x an involution."""
    inv_classes = [c for c in group.classes if c.element_order == 2]
    if len(inv_classes) != 1:
        raise NotCovered("involutions are not all conjugate")
    by_class = {r.class_index: r for r in records}
    n_inv = group.involution_count
    lhs = by_class[inv_classes[0].index].size * n_inv
    rhs = 0
    for cls in group.classes:
        sol = by_class[cls.index].members
        rhs += cls.size * int(np.count_nonzero(group.orders[sol] == 2))
    return lhs == rhs, lhs, rhs
