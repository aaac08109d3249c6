"""Serialisation of graphs, cycles, colourings and verification reports.

Adjacency format: first line the vertex count n, then n lines of n
characters '0'/'1'; every line newline-terminated.  Cycles are one line of
1-based vertex indices.  Colourings are lines "vertex,color" with 1-based
vertices and 0-based colours.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .closed_form import NotCovered, classify_case, closed_form_profile, family_key
from .graph import SolubilityGraph
from .groups import Group

STATUSES = ("match", "mismatch", "not-covered", "warning")


class AdjacencyError(ValueError):
    pass


class AdjacencyFormatError(AdjacencyError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class AdjacencySymmetryError(AdjacencyError):
    def __init__(self, i: int, j: int):
        super().__init__(f"adjacency is not symmetric at ({i}, {j})")
        self.entry = (i, j)


class AdjacencyDiagonalError(AdjacencyError):
    def __init__(self, i: int):
        super().__init__(f"nonzero diagonal entry at ({i}, {i})")
        self.vertex = i


def adjacency_text(graph: SolubilityGraph) -> str:
    n = graph.vertex_count
    if n == 0:
        return "0\n"
    rows = np.where(graph.adjacency, ord("1"), ord("0")).astype(np.uint8)
    body = np.hstack([rows, np.full((n, 1), ord("\n"), dtype=np.uint8)])
    return f"{n}\n" + body.tobytes().decode("ascii")


def export_adjacency(graph: SolubilityGraph, destination) -> Path:
    path = Path(destination)
    path.write_text(adjacency_text(graph), encoding="ascii", newline="\n")
    return path


def parse_adjacency(text: str) -> SolubilityGraph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise AdjacencyFormatError("empty file", 1)
    try:
        n = int(lines[0])
    except ValueError:
        raise AdjacencyFormatError(f"expected vertex count, got {lines[0]!r}", 1) from None
    if n < 0:
        raise AdjacencyFormatError("negative vertex count", 1)
    if len(lines) - 1 != n:
        raise AdjacencyFormatError(f"expected {n} rows, found {len(lines) - 1}", min(len(lines), n + 1) + 1)
    adj = np.zeros((n, n), dtype=bool)
    for i, row in enumerate(lines[1:]):
        if len(row) != n:
            raise AdjacencyFormatError(f"row has {len(row)} characters, expected {n}", i + 2)
        if row.strip("01"):
            raise AdjacencyFormatError("row contains characters other than 0 and 1", i + 2)
        adj[i] = np.frombuffer(row.encode("ascii"), dtype=np.uint8) == ord("1")
    diag = np.flatnonzero(np.diagonal(adj))
    if len(diag):
        raise AdjacencyDiagonalError(int(diag[0]))
    asym = np.argwhere(adj != adj.T)
    if len(asym):
        i, j = asym[0]
        raise AdjacencySymmetryError(int(i), int(j))
    return SolubilityGraph(adj)


def import_adjacency(source) -> SolubilityGraph:
    return parse_adjacency(Path(source).read_text(encoding="ascii"))


def write_cycle(cycle, destination) -> Path:
    path = Path(destination)
    path.write_text(" ".join(str(int(v) + 1) for v in cycle) + "\n", encoding="ascii")
    return path


def read_cycle(source) -> list[int]:
    return [int(t) - 1 for t in Path(source).read_text(encoding="ascii").split()]


def write_coloring(colors, destination) -> Path:
    path = Path(destination)
    path.write_text("".join(f"{v + 1},{int(c)}\n" for v, c in enumerate(colors)), encoding="ascii")
    return path


def read_coloring(source) -> np.ndarray:
    pairs = [line.split(",") for line in Path(source).read_text(encoding="ascii").splitlines() if line]
    colors = np.full(len(pairs), -1, dtype=np.int64)
    for v, c in pairs:
        colors[int(v) - 1] = int(c)
    return colors


# ---------------------------------------------------------------------------
# verification report


@dataclass
class VerificationReport:
    group_spec: str
    group_order: int
    classes: list = field(default_factory=list)
    graph: dict | None = None
    conjectures: list | None = None
    extra: dict = field(default_factory=dict)
    tool_version: str = __version__
    timestamp: str | None = None

    @property
    def statuses(self) -> list[str]:
        out = [row["closed_form_status"] for row in self.classes]
        out += [row["count_status"] for row in self.classes if row.get("count_status")]
        return out

    @property
    def has_mismatch(self) -> bool:
        if "mismatch" in self.statuses:
            return True
        return any(not c["passed"] for c in self.conjectures or [])

    def to_dict(self) -> dict:
        return {
            "group_spec": self.group_spec,
            "group_order": self.group_order,
            "classes": self.classes,
            "graph": self.graph,
            "conjectures": self.conjectures,
            "extra": self.extra,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
        }


def class_rows(group: Group, records, count_reports: dict | None = None) -> list[dict]:
    """One row per class with the brute-force size and the closed-form verdict."""
    rows = []
    for rec in records:
        row = rec.summary()
        try:
            if rec.representative == 0:
                # Sol(1) = G; only meaningful where the tables apply at all
                family_key(group.spec)
                predicted, column = group.order, "identity"
            else:
                key = classify_case(group, rec.class_index)
                predicted, column = closed_form_profile(key).sol_size, key.column
            row["closed_form_column"] = column
            row["closed_form_sol_size"] = predicted
            row["closed_form_status"] = "match" if predicted == rec.size else "mismatch"
        except NotCovered as exc:
            row["closed_form_column"] = None
            row["closed_form_sol_size"] = None
            row["closed_form_status"] = "not-covered"
            row["closed_form_note"] = str(exc)
        if count_reports and rec.class_index in count_reports:
            cr = count_reports[rec.class_index]
            row["count_status"] = cr.status
            row["counts"] = cr.to_dict()
        rows.append(row)
    return rows


def build_report(group: Group, records, count_reports=None, graph=None, conjectures=None, extra=None) -> VerificationReport:
    return VerificationReport(
        group_spec=str(group.spec),
        group_order=group.order,
        classes=class_rows(group, records, count_reports),
        graph=graph,
        conjectures=[c.to_dict() for c in conjectures] if conjectures is not None else None,
        extra=extra or {},
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def report_json(report: VerificationReport) -> str:
    return json.dumps(_jsonable(report.to_dict()), sort_keys=True, indent=2) + "\n"


CSV_COLUMNS = (
    "class_index", "representative", "element_order", "class_size", "normalizer_order",
    "sol_size", "probability", "is_subgroup", "is_soluble",
    "closed_form_column", "closed_form_sol_size", "closed_form_status", "count_status",
)


def emit_report(report: VerificationReport, destination, fmt: str = "json") -> Path:
    """Write the report as structured JSON or as a CSV class table."""
    path = Path(destination)
    if fmt == "json":
        path.write_text(report_json(report), encoding="utf-8")
    elif fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            for row in report.classes:
                w.writerow({k: row.get(k, "") for k in CSV_COLUMNS})
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path
