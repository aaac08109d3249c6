"""Command-line entry point: build a group, compute solubilizers, verify, report.

Exit status: 0 when every check passes (not-covered is not a failure),
1 on any verification mismatch (an evidence file is written), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import closed_form as cf
from . import graph as gr
from . import reports
from .conjectures import predicts_eulerian, run_scanners
from .groups import GroupSpec, GroupSpecError, build_group
from .solubilizer import ModeError, _check_mode, all_overgroups, default_mode, solubilizer

COMMANDS = (
    "classes", "sol", "verify-tables", "graph", "color", "hamiltonian",
    "eulerian", "conjectures", "appendix", "export-adj",
)
GRAPH_COMMANDS = {"graph", "color", "hamiltonian", "export-adj"}

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    group: str
    commands: list
    seed: int = 0
    restarts: int = 1000
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    out: Path = Path("solkit-out")
    allow_large: bool = False
    mode: str | None = None

    def validate(self) -> GroupSpec:
        try:
            spec = GroupSpec.parse(self.group)
        except GroupSpecError as exc:
            raise UsageError(str(exc)) from None
        unknown = [c for c in self.commands if c not in COMMANDS]
        if unknown or not self.commands:
            raise UsageError(f"unknown command(s) {unknown}; choose from {', '.join(COMMANDS)}")
        if self.mode not in (None, "shortcut", "general", "both"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.mode in ("shortcut", "both") and not spec.is_minimal_simple:
            raise UsageError(f"shortcut mode needs a minimal simple group; {spec.name} is not")
        if self.threads < 1 or self.restarts < 1:
            raise UsageError("--threads and --restarts must be positive")
        if GRAPH_COMMANDS & set(self.commands) and spec.theoretical_order > gr.LARGE_GRAPH and not self.allow_large:
            raise UsageError(f"graph of {spec.name} needs --allow-large")
        return spec


class Run:
    """State shared by the stages of one invocation."""

    def __init__(self, config: RunConfig, out=print):
        self.config = config
        self.say = out
        self.group = build_group(config.group)
        self.mode = default_mode(self.group) if config.mode in (None, "both") else config.mode
        self._records = None
        self._overgroups = None
        self._graph = None
        self.graph_info: dict = {}
        self.count_reports: dict = {}
        self.extra: dict = {}
        self.failures: list = []
        self.artifacts: list = []
        self.scans = None

    def records_for(self, mode):
        _check_mode(self.group, mode)
        n = len(self.group.classes)
        with ThreadPoolExecutor(self.config.threads) as pool:
            return list(pool.map(lambda i: solubilizer(self.group, i, mode), range(n)))

    @property
    def records(self):
        if self._records is None:
            self._records = self.records_for(self.mode)
            if self.config.mode == "both":
                other = self.records_for("general" if self.mode == "shortcut" else "shortcut")
                for a, b in zip(self._records, other):
                    if not np.array_equal(a.members, b.members):
                        self.fail("mode-agreement", {"class_index": a.class_index, "sizes": [a.size, b.size]})
                self.say(f"modes agree on {len(other)} classes" if not self.failures else "modes DISAGREE")
        return self._records

    @property
    def overgroups(self):
        if self._overgroups is None:
            self._overgroups = all_overgroups(self.group, self.records, self.mode)
        return self._overgroups

    @property
    def graph(self):
        if self._graph is None:
            self._graph = gr.build_graph(self.group, self.records, allow_large=self.config.allow_large)
        return self._graph

    def fail(self, check, evidence):
        self.failures.append({"check": check, "evidence": evidence})

    def artifact(self, path):
        self.artifacts.append(str(path))
        self.say(f"wrote {path}")

    # -- stages ---------------------------------------------------------------

    def classes(self):
        self.say(f"{self.group.spec.name}: order {self.group.order}, {len(self.group.classes)} classes")
        self.say("index  order  size  |N(<x>)|")
        for c in self.group.classes:
            self.say(f"{c.index:5d} {c.element_order:6d} {c.size:5d} {c.normalizer_order:9d}")

    def sol(self):
        self.say("index  order  |Sol|  P_S  subgroup")
        for r in self.records:
            self.say(f"{r.class_index:5d} {r.element_order:6d} {r.size:6d}  {r.probability}  {r.is_subgroup}")

    def verify_tables(self):
        covered = self.group.spec.is_minimal_simple
        if covered:
            for rec in self.records:
                if rec.representative == 0:
                    continue
                profile = cf.closed_form_profile(cf.classify_case(self.group, rec.class_index))
                report = cf.verify_maximal_counts(self.group, rec.class_index, profile, self.overgroups[rec.class_index])
                self.count_reports[rec.class_index] = report
                if report.status == "mismatch":
                    self.fail("maximal-counts", report.to_dict())
        rows = reports.class_rows(self.group, self.records, self.count_reports)
        for row in rows:
            if row["closed_form_status"] == "mismatch":
                self.fail("sol-size", row)
        matched = sum(r["closed_form_status"] == "match" for r in rows)
        self.say(f"closed form: {matched}/{len(rows)} match" if covered else "closed form: not covered")
        for row in rows:
            extra = f" counts {row['count_status']}" if row.get("count_status") else ""
            self.say(f"  class {row['class_index']}: |Sol| {row['sol_size']} vs {row['closed_form_sol_size']} "
                     f"[{row['closed_form_status']}]{extra}")
        try:
            ok, lhs, rhs = cf.involution_identity_check(self.group, self.records)
            self.extra["involution_identity"] = {"lhs": lhs, "rhs": rhs, "status": "match" if ok else "mismatch"}
            self.say(f"involution identity: {lhs} = {rhs}" if ok else f"involution identity FAILS: {lhs} != {rhs}")
            if not ok:
                self.fail("involution-identity", {"lhs": lhs, "rhs": rhs})
        except cf.NotCovered as exc:
            self.extra["involution_identity"] = {"status": "not-covered", "note": str(exc)}

    def graph_stage(self):
        g = self.graph
        sizes = np.zeros(len(self.group.classes), dtype=np.int64)
        for r in self.records:
            sizes[r.class_index] = r.size
        degree_ok = bool(np.array_equal(g.degrees, sizes[self.group.class_of[1:]] - 2))
        connected = g.is_connected()
        self.graph_info.update(vertices=g.vertex_count, edges=g.edge_count, connected=connected,
                               max_degree=int(g.degrees.max()), degrees_match_sol=degree_ok)
        self.say(f"graph: {g.vertex_count} vertices, {g.edge_count} edges, connected={connected}")
        if not (degree_ok and connected):
            self.fail("graph", dict(self.graph_info))

    def color(self):
        bound, witness = gr.clique_lower_bound(self.group, self.records, self.overgroups, self.graph)
        res = gr.best_coloring(self.graph, seed=self.config.seed, lower_bound=bound)
        proper = gr.is_proper_coloring(self.graph, res.colors)
        self.graph_info.update(chi_lower=bound, chi_upper=res.color_count, brooks=res.upper_bound_brooks,
                               coloring_order=res.order, coloring_seed=res.seed, coloring_proper=proper)
        exact = " (exact)" if bound == res.color_count else ""
        self.say(f"chromatic number: {bound} <= chi <= {res.color_count}{exact}; Brooks bound {res.upper_bound_brooks}")
        self.graph_info["full_graph"] = gr.full_graph_stats(self.group, self.graph_info)
        if not proper or bound > res.color_count:
            self.fail("coloring", {"proper": proper, "lower": bound, "found": res.color_count})
        self.artifact(reports.write_coloring(res.colors, self.config.out / "coloring.csv"))

    def hamiltonian(self):
        res = gr.hamiltonian_search(self.graph, self.config.seed, self.config.restarts)
        valid = res.found and gr.validate_cycle(self.graph, res.cycle)
        self.graph_info.update(hamiltonian=valid, hamiltonian_seed=res.seed, hamiltonian_attempts=res.attempts)
        self.say(f"hamiltonian cycle: {'found' if valid else 'not found'} (seed {res.seed}, {res.attempts} attempts)")
        if res.found and not valid:
            self.fail("hamiltonian", {"cycle": res.cycle})
        if valid:
            self.artifact(reports.write_cycle(res.cycle, self.config.out / "cycle.txt"))
        spec = self.group.spec
        if spec.family == "psl2" and spec.q % 2:
            check = gr.dihedral_bottleneck_check(self.group, self.records)
            self.graph_info["bottleneck"] = check
            self.say(f"involutions {check['involutions']}, petals {check['petals']}")

    def eulerian(self):
        verdict, witness = gr.eulerian_check(self.group, self.records, self._graph)
        predicted = predicts_eulerian(self.group.spec)
        self.graph_info["eulerian"] = verdict
        self.graph_info["eulerian_witness"] = witness.summary() if witness else None
        if verdict:
            self.say("Eulerian")
        else:
            self.say(f"not Eulerian: class {witness.class_index} of order {witness.element_order} has |Sol| = {witness.size}")
        if predicted is not None and predicted != verdict:
            self.fail("eulerian", {"predicted": predicted, "observed": verdict})

    def conjectures(self):
        self.scans = run_scanners(self.group, self.records)
        for s in self.scans:
            note = f" ({s.note})" if s.note else ""
            self.say(f"{'PASS' if s.passed else 'FAIL'} {s.name}{note}")
            if not s.passed:
                self.fail("conjecture", s.to_dict())

    def appendix(self):
        if not (self.group.spec.family == "psl3" and self.group.spec.q == 3):
            self.extra["appendix"] = "not-covered"
            self.say("pair intersections: not covered for this group")
            return
        out = {}
        for rec in self.records:
            if rec.representative == 0:
                continue
            key = cf.classify_case(self.group, rec.class_index)
            if key.column in out:
                continue
            profile = cf.closed_form_profile(key)
            found = cf.pair_intersection_tally(self.group, profile, self.overgroups[rec.class_index])
            expected = cf.expected_pair_intersections(key.column)
            ok = found == expected
            out[key.column] = {"status": "match" if ok else "mismatch",
                               "found": [[*k, v] for k, v in sorted(found.items(), key=str)],
                               "expected": [[*k, v] for k, v in sorted(expected.items(), key=str)]}
            self.say(f"pair intersections, column {key.column}: {sum(found.values())} pairs [{out[key.column]['status']}]")
            if not ok:
                self.fail("appendix", {"column": key.column, **out[key.column]})
        self.extra["appendix"] = out

    def export_adj(self):
        self.artifact(reports.export_adjacency(self.graph, self.config.out / "adjacency.txt"))

    STAGES = {
        "classes": classes, "sol": sol, "verify-tables": verify_tables, "graph": graph_stage,
        "eulerian": eulerian, "color": color, "hamiltonian": hamiltonian,
        "conjectures": conjectures, "appendix": appendix, "export-adj": export_adj,
    }

    def execute(self) -> int:
        self.config.out.mkdir(parents=True, exist_ok=True)
        for name in COMMANDS:
            if name in self.config.commands:
                self.STAGES[name](self)
        if self.config.commands != ["classes"]:
            report = reports.build_report(self.group, self.records, self.count_reports,
                                          self.graph_info or None, self.scans, self.extra)
            self.artifact(reports.emit_report(report, self.config.out / "report.json", "json"))
            self.artifact(reports.emit_report(report, self.config.out / "classes.csv", "csv"))
        if self.failures:
            path = self.config.out / "evidence.json"
            path.write_text(json.dumps(reports._jsonable(self.failures), sort_keys=True, indent=2) + "\n")
            self.artifact(path)
            return EXIT_MISMATCH
        return EXIT_OK


def run(config: RunConfig, out=print) -> int:
    try:
        config.validate()
    except UsageError as exc:
        out(f"error: {exc}")
        return EXIT_USAGE
    return Run(config, out).execute()


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="solkit", description="Solubilizers and solubility graphs of small simple groups.")
    p.add_argument("commands", nargs="+", metavar="command", help=f"one or more of: {', '.join(COMMANDS)}")
    p.add_argument("--group", required=True, help="family:q, e.g. psl2:8, psl3:3, sz:8, psl4:2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1000, help="Hamiltonian search restarts")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", type=Path, default=Path("solkit-out"))
    p.add_argument("--allow-large", action="store_true", help="permit graphs above 10000 vertices")
    p.add_argument("--mode", choices=("shortcut", "general", "both"), default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    config = RunConfig(args.group, args.commands, args.seed, args.restarts, args.threads,
                       args.out, args.allow_large, args.mode)
    try:
        return run(config)
    except (ModeError, gr.LargeGraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
