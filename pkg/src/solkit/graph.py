"""The induced solubility graph on G minus the identity, and its analyses."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .groups import Group
from .solubilizer import SolubilizerRecord, all_overgroups, membership_matrix

# Sz(8) and anything else above this needs an explicit opt-in
LARGE_GRAPH = 10_000
ORDERS = ("canonical", "degree-descending", "seeded-random")


class LargeGraphError(RuntimeError):
    pass


@dataclass
class SolubilityGraph:
    adjacency: np.ndarray  # bool, symmetric, zero diagonal
    vertex_to_element: np.ndarray | None = None
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        self.degrees = self.adjacency.sum(axis=1, dtype=np.int64)

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def is_connected(self) -> bool:
        if self.vertex_count <= 1:
            return True
        ncomp, _ = connected_components(csr_matrix(self.adjacency), directed=False)
        return ncomp == 1

    def same_structure(self, other: "SolubilityGraph") -> bool:
        return np.array_equal(self.adjacency, other.adjacency)


def graph_from_edges(n: int, edges) -> SolubilityGraph:
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        adj[u, v] = adj[v, u] = True
    return SolubilityGraph(adj)


def complete_graph(n: int) -> SolubilityGraph:
    adj = ~np.eye(n, dtype=bool)
    return SolubilityGraph(adj)


def build_graph(group: Group, records: list[SolubilizerRecord], allow_large: bool = False) -> SolubilityGraph:
    """Adjacency from conjugated per-class Sol sets; no pair is re-tested."""
    if group.order > LARGE_GRAPH and not allow_large:
        raise LargeGraphError(f"{group.spec.name} has {group.order} elements; pass allow_large to build its graph")
    A = membership_matrix(group, records)
    adj = A[1:, 1:]
    np.fill_diagonal(adj, False)
    return SolubilityGraph(np.ascontiguousarray(adj), np.arange(1, group.order))


def eulerian_check(group: Group, records, graph: SolubilityGraph | None = None):
    """(eulerian, witness record).  Degree of x is |Sol(x)| - 2, so parity follows |Sol(x)|."""
    witness = next((r for r in records if r.representative != 0 and r.size % 2), None)
    verdict = witness is None
    if graph is not None:
        by_degree = bool((graph.degrees % 2 == 0).all()) and graph.is_connected()
        if by_degree != verdict:
            raise AssertionError("degree parity disagrees with class solubilizer sizes")
    return verdict, witness


# ---------------------------------------------------------------------------
# colouring


@dataclass
class ColoringResult:
    colors: np.ndarray
    color_count: int
    lower_bound: int
    upper_bound_brooks: int
    order: str
    seed: int | None = None

    @property
    def within_brooks(self) -> bool:
        return self.color_count <= self.upper_bound_brooks


def vertex_order(graph: SolubilityGraph, order: str = "canonical", seed: int = 0) -> np.ndarray:
    n = graph.vertex_count
    if order == "canonical":
        return np.arange(n)
    if order == "degree-descending":
        return np.argsort(-graph.degrees, kind="stable")
    if order == "seeded-random":
        return np.random.default_rng(seed).permutation(n)
    raise ValueError(f"unknown order {order!r}; choose from {ORDERS}")


def greedy_coloring(
    graph: SolubilityGraph, order: str = "canonical", seed: int = 0, lower_bound: int = 1
) -> ColoringResult:
    """First-fit colouring along the chosen vertex order."""
    n = graph.vertex_count
    colors = np.full(n, -1, dtype=np.int64)
    for v in vertex_order(graph, order, seed):
        taken = colors[graph.adjacency[v]]
        taken = np.unique(taken[taken >= 0])
        # smallest colour not in the sorted taken list
        gaps = np.flatnonzero(taken != np.arange(len(taken)))
        colors[v] = gaps[0] if len(gaps) else len(taken)
    count = int(colors.max()) + 1 if n else 0
    brooks = int(graph.degrees.max()) if n else 0
    # Brooks: chi <= max degree except for complete graphs and odd cycles
    if n and graph.edge_count == n * (n - 1) // 2:
        brooks = n
    return ColoringResult(colors, count, lower_bound, max(brooks, 1 if n else 0), order, seed if order == "seeded-random" else None)


def is_proper_coloring(graph: SolubilityGraph, colors) -> bool:
    colors = np.asarray(colors)
    if len(colors) != graph.vertex_count or (colors < 0).any():
        return False
    u, v = np.nonzero(np.triu(graph.adjacency, 1))
    return not (colors[u] == colors[v]).any()


def best_coloring(graph: SolubilityGraph, seed: int = 0, restarts: int = 64, lower_bound: int = 1) -> ColoringResult:
    """Fewest colours over the fixed orders and up to ``restarts`` seeded-random ones.

    Stops early once the count meets ``lower_bound``, since that is optimal.
    """
    best = None
    runs = [("canonical", 0), ("degree-descending", 0)] + [("seeded-random", seed + i) for i in range(restarts)]
    for order, s in runs:
        res = greedy_coloring(graph, order, s, lower_bound)
        if best is None or res.color_count < best.color_count:
            best = res
        if best.color_count <= lower_bound:
            break
    return best


def is_clique(graph: SolubilityGraph, vertices) -> bool:
    v = np.asarray(vertices, dtype=np.int64)
    sub = graph.adjacency[np.ix_(v, v)]
    return len(np.unique(v)) == len(v) and int(sub.sum()) == len(v) * (len(v) - 1)


def clique_lower_bound(group: Group, records, overgroups: dict | None = None, graph: SolubilityGraph | None = None):
    """(bound, witness vertices): involutions, or a largest soluble subgroup minus the identity.

    Vertex v corresponds to element v + 1.
    """
    if group.order <= 2:
        return 1, np.zeros(min(group.order - 1, 1), dtype=np.int64)
    invol = np.flatnonzero(group.orders == 2)
    best = invol
    if overgroups is None:
        overgroups = all_overgroups(group, records)
    for subs in overgroups.values():
        for M in subs:
            if len(M) - 1 > len(best):
                best = M[M != 0]
    witness = np.sort(best) - 1
    if graph is not None and not is_clique(graph, witness):
        raise AssertionError("clique witness is not complete")
    return len(witness), witness


# ---------------------------------------------------------------------------
# Hamiltonian search


@dataclass
class CycleResult:
    found: bool
    cycle: list | None
    seed: int
    restarts: int
    attempts: int = 0


def validate_cycle(graph: SolubilityGraph, cycle) -> bool:
    n = graph.vertex_count
    if cycle is None or len(cycle) != n:
        return False
    c = np.asarray(cycle, dtype=np.int64)
    if len(np.unique(c)) != n or c.min() < 0 or c.max() >= n:
        return False
    if n == 1:
        return True
    return bool(graph.adjacency[c, np.roll(c, -1)].all())


def _rotate_to_extend(adj, path, visited, rng, tries):
    """Posa rotations on a stuck endpoint until it gains an unvisited neighbour."""
    for _ in range(tries):
        end = path[-1]
        pos = np.flatnonzero(adj[end, path[:-2]])
        if not len(pos):
            return path, False
        i = int(rng.choice(pos))
        path[i + 1:] = path[i + 1:][::-1]
        if (adj[path[-1]] & ~visited).any():
            return path, True
    return path, False


def _close(adj, path, rng, tries):
    """Turn a Hamiltonian path into a cycle, rotating the far end if needed."""
    for _ in range(tries):
        if adj[path[-1], path[0]]:
            return path
        # v_i ~ end and v_{i+1} ~ start gives a cycle directly
        hits = np.flatnonzero(adj[path[-1], path[:-1]] & adj[path[0], path[1:]])
        if len(hits):
            i = int(hits[0])
            path[i + 1:] = path[i + 1:][::-1]
            return path
        pos = np.flatnonzero(adj[path[-1], path[:-2]])
        if not len(pos):
            return None
        i = int(rng.choice(pos))
        path[i + 1:] = path[i + 1:][::-1]
    return None


def hamiltonian_search(
    graph: SolubilityGraph, seed: int = 0, max_restarts: int = 1000, rotations: int = 50
) -> CycleResult:
    """Randomised walk that always moves to the unvisited neighbour with fewest unvisited neighbours.

    Ties are broken by a seeded generator.  A stuck walk is first given a
    bounded number of Posa rotations, then restarted.
    """
    n = graph.vertex_count
    rng = np.random.default_rng(seed)
    if n == 0:
        return CycleResult(False, None, seed, max_restarts)
    if n == 1:
        return CycleResult(True, [0], seed, max_restarts, 1)
    adj = graph.adjacency
    adj_int = adj.astype(np.int32)
    for attempt in range(1, max_restarts + 1):
        visited = np.zeros(n, dtype=bool)
        remaining = graph.degrees.astype(np.int64).copy()
        path = np.empty(n, dtype=np.int64)
        start = int(rng.integers(n))
        path[0] = start
        visited[start] = True
        remaining -= adj_int[start]
        length = 1
        while length < n:
            cur = path[length - 1]
            cand = np.flatnonzero(adj[cur] & ~visited)
            if not len(cand):
                head, ok = _rotate_to_extend(adj, path[:length].copy(), visited, rng, rotations)
                if not ok:
                    break
                path[:length] = head
                continue
            r = remaining[cand]
            nxt = int(rng.choice(cand[r == r.min()]))
            path[length] = nxt
            visited[nxt] = True
            remaining -= adj_int[nxt]
            length += 1
        if length < n:
            continue
        cycle = _close(adj, path.copy(), rng, rotations)
        if cycle is not None and validate_cycle(graph, cycle):
            return CycleResult(True, [int(v) for v in cycle], seed, max_restarts, attempt)
    return CycleResult(False, None, seed, max_restarts, max_restarts)


# ---------------------------------------------------------------------------
# counting checks


def dihedral_bottleneck_check(group: Group, records) -> dict:
    """Involutions versus 'petals': the distinct Sol sets of order q+1 met by elements
    of order dividing (q+1)/2 and greater than 2.  Non-involutions of a petal must see
    only their own petal and involutions."""
    spec = group.spec
    if spec.family != "psl2" or spec.q % 2 == 0:
        raise ValueError(f"bottleneck check needs PSL(2,q) with q odd, got {spec.name}")
    q = spec.q
    by_class = {r.class_index: r for r in records}
    petals = {}
    for cls in group.classes:
        k = cls.element_order
        rec = by_class[cls.index]
        if k <= 2 or ((q + 1) // 2) % k or rec.size != q + 1:
            continue
        for m, c in zip(cls.members, cls.conjugators):
            s = np.sort(group.conjugate(rec.members, int(c)))
            petals.setdefault(s.tobytes(), s)
    invol = group.orders == 2
    sealed = True
    owner = {}
    for s in petals.values():
        for y in s[~invol[s] & (s != 0)]:
            if owner.setdefault(int(y), id(s)) != id(s):
                sealed = False
    n_inv = int(invol.sum())
    return {
        "group": spec.name,
        "involutions": n_inv,
        "petals": len(petals),
        "petals_sealed": sealed,
        "bottleneck": n_inv < len(petals) + 1,
    }


def full_graph_stats(group: Group, delta: dict) -> dict:
    """Facts about the full graph on G: one extra vertex, adjacent to everything."""
    return {
        "vertex_count": group.order,
        "chi_lower": delta["chi_lower"] + 1,
        "chi_upper": delta["chi_upper"] + 1,
        # the identity has odd degree |G| - 1
        "eulerian": False,
        # a cycle in the induced graph lifts; without one nothing is claimed
        "hamiltonian": True if delta.get("hamiltonian") else None,
    }
