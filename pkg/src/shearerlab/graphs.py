"""Interaction bipartite graphs, dependency graphs, cyclic containment and reductions.

Vertices are 1-indexed everywhere in the public API.  Left vertices are the
events / Hamiltonians, right vertices the variables / qudits.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .config import limits


class GraphError(ValueError):
    """Invalid vertex indices, malformed graphs or an inapplicable reduction."""


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class BipartiteGraph:
    m: int
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise GraphError("vertex counts must be nonnegative")
        raw = list(self.edges)
        norm = frozenset((int(i), int(j)) for i, j in raw)
        if len(norm) != len(raw):
            raise GraphError("duplicate edges")
        for i, j in norm:
            if not (1 <= i <= self.m and 1 <= j <= self.n):
                raise GraphError(f"edge ({i},{j}) outside 1..{self.m} x 1..{self.n}")
        object.__setattr__(self, "edges", norm)

    @classmethod
    def from_edges(cls, m: int, n: int, edges: Iterable) -> "BipartiteGraph":
        return cls(m, n, frozenset(tuple(e) for e in edges))

    @classmethod
    def cycle(cls, length: int) -> "BipartiteGraph":
        """Canonical cyclic graph: left i acts on right i and i+1 (mod length)."""
        es = set()
        for i in range(1, length + 1):
            es.add((i, i))
            es.add((i, i % length + 1))
        return cls(length, length, frozenset(es))

    @cached_property
    def left_nbrs(self) -> tuple[frozenset, ...]:
        acc = [set() for _ in range(self.m + 1)]
        for i, j in self.edges:
            acc[i].add(j)
        return tuple(frozenset(s) for s in acc)

    @cached_property
    def right_nbrs(self) -> tuple[frozenset, ...]:
        acc = [set() for _ in range(self.n + 1)]
        for i, j in self.edges:
            acc[j].add(i)
        return tuple(frozenset(s) for s in acc)

    def nbrs_left(self, i: int) -> frozenset:
        self._check_left(i)
        return self.left_nbrs[i]

    def nbrs_right(self, j: int) -> frozenset:
        self._check_right(j)
        return self.right_nbrs[j]

    def _check_left(self, i):
        if not (isinstance(i, int) and 1 <= i <= self.m):
            raise GraphError(f"unknown left vertex {i!r}")

    def _check_right(self, j):
        if not (isinstance(j, int) and 1 <= j <= self.n):
            raise GraphError(f"unknown right vertex {j!r}")

    def is_forest(self) -> bool:
        # union-find over m + n vertices
        parent = list(range(self.m + self.n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            a, b = find(i), find(self.m + j)
            if a == b:
                return False
            parent[a] = b
        return True

    def is_tree(self) -> bool:
        return len(self.edges) == self.m + self.n - 1 and self.is_forest()

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, obj: dict) -> "BipartiteGraph":
        try:
            return cls.from_edges(int(obj["m"]), int(obj["n"]), [tuple(e) for e in obj["edges"]])
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc


@dataclass(frozen=True)
class DependencyGraph:
    m: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise GraphError(f"self-loop at {a}")
            if not (1 <= a <= self.m and 1 <= b <= self.m):
                raise GraphError(f"edge ({a},{b}) outside 1..{self.m}")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, m: int, edges: Iterable) -> "DependencyGraph":
        return cls(m, frozenset(tuple(e) for e in edges))

    @classmethod
    def cycle(cls, m: int) -> "DependencyGraph":
        return cls(m, frozenset((i, i % m + 1) for i in range(1, m + 1)))

    @classmethod
    def path(cls, m: int) -> "DependencyGraph":
        return cls(m, frozenset((i, i + 1) for i in range(1, m)))

    @classmethod
    def complete(cls, m: int) -> "DependencyGraph":
        return cls(m, frozenset(combinations(range(1, m + 1), 2)))

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        acc = [set() for _ in range(self.m + 1)]
        for a, b in self.edges:
            acc[a].add(b)
            acc[b].add(a)
        return tuple(frozenset(s) for s in acc)

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        """Bit v-1 set in entry v-1 for each neighbour; 0-indexed list."""
        out = []
        for v in range(1, self.m + 1):
            mask = 0
            for u in self.adjacency[v]:
                mask |= 1 << (u - 1)
            out.append(mask)
        return tuple(out)

    def check_vertex(self, v):
        if not (isinstance(v, int) and 1 <= v <= self.m):
            raise GraphError(f"unknown vertex {v!r}")

    def gamma(self, v: int) -> frozenset:
        self.check_vertex(v)
        return self.adjacency[v]

    def gamma_plus(self, v: int) -> frozenset:
        return self.gamma(v) | {v}

    def max_degree(self) -> int:
        return max((len(self.adjacency[v]) for v in range(1, self.m + 1)), default=0)

    def distances_from(self, v: int) -> dict[int, int]:
        self.check_vertex(v)
        dist = {v: 0}
        todo = deque([v])
        while todo:
            u = todo.popleft()
            for w in sorted(self.adjacency[u]):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    todo.append(w)
        return dist

    def distance(self, a: int, b: int) -> int | None:
        """Shortest-path length, None when disconnected."""
        self.check_vertex(b)
        return self.distances_from(a).get(b)

    def mask_of(self, vertices: Iterable[int]) -> int:
        mask = 0
        for v in vertices:
            self.check_vertex(v)
            mask |= 1 << (v - 1)
        return mask

    def is_connected_mask(self, mask: int) -> bool:
        if mask == 0:
            return True
        adj = self.adj_masks
        start = mask & -mask
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            for b in _bits(frontier):
                nxt |= adj[b]
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        return seen == mask

    def is_chordal(self) -> bool:
        """Repeatedly strip simplicial vertices; chordal iff everything goes."""
        alive = set(range(1, self.m + 1))
        adj = {v: set(self.adjacency[v]) for v in alive}
        progress = True
        while alive and progress:
            progress = False
            for v in sorted(alive):
                nb = adj[v] & alive
                if all(b in adj[a] for a, b in combinations(nb, 2)):
                    alive.remove(v)
                    progress = True
                    break
        return not alive

    def is_forest(self) -> bool:
        parent = list(range(self.m + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
        return True

    def to_json(self) -> dict:
        return {"m": self.m, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, obj: dict) -> "DependencyGraph":
        try:
            return cls.from_edges(int(obj["m"]), [tuple(e) for e in obj["edges"]])
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed dependency graph JSON: {exc}") from exc


def base_graph(g: BipartiteGraph) -> DependencyGraph:
    es = set()
    for j in range(1, g.n + 1):
        for a, b in combinations(sorted(g.right_nbrs[j]), 2):
            es.add((a, b))
    return DependencyGraph(g.m, frozenset(es))


def as_dependency(g: BipartiteGraph | DependencyGraph) -> DependencyGraph:
    return base_graph(g) if isinstance(g, BipartiteGraph) else g


def graph_query(g: BipartiteGraph | DependencyGraph, kind: str, *args):
    """Structural questions about g or its base graph.

    kinds: neighbors (left i, or ("right", j)), gamma, gamma_plus, max_degree,
    distance, is_solitary (right vertex j).
    """
    d = as_dependency(g)
    if kind == "neighbors":
        if isinstance(g, BipartiteGraph):
            if len(args) == 2 and args[0] == "right":
                return g.nbrs_right(args[1])
            return g.nbrs_left(args[0])
        return d.gamma(args[0])
    if kind == "gamma":
        return d.gamma(args[0])
    if kind == "gamma_plus":
        return d.gamma_plus(args[0])
    if kind == "max_degree":
        return d.max_degree()
    if kind == "distance":
        d.check_vertex(args[0])
        return d.distance(args[0], args[1])
    if kind == "is_solitary":
        if not isinstance(g, BipartiteGraph):
            raise GraphError("is_solitary needs a bipartite graph")
        return is_solitary(g, args[0])
    raise GraphError(f"unknown query kind {kind!r}")


def is_solitary(g: BipartiteGraph, j: int) -> bool:
    """Any two left vertices on j share nothing but j."""
    users = sorted(g.nbrs_right(j))
    return all(g.left_nbrs[a] & g.left_nbrs[b] == {j} for a, b in combinations(users, 2))


def _check_subset(m: int, S) -> list[int]:
    out = sorted(set(S))
    for v in out:
        if not (isinstance(v, int) and 1 <= v <= m):
            raise GraphError(f"subset member {v!r} outside 1..{m}")
    return out


def induced_subgraph(g, S):
    """Restrict to left vertices S, relabelled 1..|S| in increasing order.

    Bipartite inputs keep every right vertex.
    """
    keep = _check_subset(g.m, S)
    pos = {v: k + 1 for k, v in enumerate(keep)}
    if isinstance(g, BipartiteGraph):
        es = frozenset((pos[i], j) for i, j in g.edges if i in pos)
        return BipartiteGraph(len(keep), g.n, es)
    es = frozenset((pos[a], pos[b]) for a, b in g.edges if a in pos and b in pos)
    return DependencyGraph(len(keep), es)


# ---------------------------------------------------------------- cycles

@dataclass(frozen=True)
class CyclicSubgraph:
    left: tuple[int, ...]
    length: int
    two_discrete: bool


def chordless_cycles(d: DependencyGraph, max_len: int | None = None) -> list[tuple[int, ...]]:
    """All induced cycles of length >= 3, each once, as vertex tuples starting at the minimum."""
    cap = max_len if max_len is not None else limits().max_cycle_length
    adj = d.adjacency
    found = []

    def extend(path):
        last = path[-1]
        for w in sorted(adj[last]):
            if w <= path[0] or w in path:
                continue
            # w must not touch any interior vertex other than `last`
            if any(w in adj[u] for u in path[1:-1]):
                continue
            closes = path[0] in adj[w]
            if closes:
                if len(path) + 1 >= 3 and path[1] < w:
                    found.append(tuple(path) + (w,))
                continue
            if len(path) + 1 < cap:
                extend(path + [w])

    for s in range(1, d.m + 1):
        for v in sorted(adj[s]):
            if v > s:
                extend([s, v])
    found.sort(key=lambda c: (len(c), c))
    return found


def find_cyclic_subgraphs(g: BipartiteGraph, max_len: int | None = None) -> list[CyclicSubgraph]:
    d = base_graph(g)
    out = []
    for cyc in chordless_cycles(d, max_len):
        S = tuple(sorted(cyc))
        if len(S) == 3 and g.left_nbrs[S[0]] & g.left_nbrs[S[1]] & g.left_nbrs[S[2]]:
            continue
        qudits = set().union(*(g.left_nbrs[i] for i in S))
        two = all(len(g.right_nbrs[j]) <= 2 for j in qudits)
        out.append(CyclicSubgraph(S, len(S), two))
    out.sort(key=lambda c: (c.length, c.left))
    return out


# ------------------------------------------------------------ reductions

@dataclass(frozen=True)
class Reduction:
    graph: BipartiteGraph
    left_map: dict     # old left index -> new index or None when deleted
    right_map: dict


FORWARD_OPS = (
    "delete_r_leaf", "duplicate_l_vertex", "duplicate_r_vertex",
    "delete_edge", "delete_l_vertex", "delete_l_leaf",
)
INVERSE = {
    "delete_r_leaf": "add_r_leaf",
    "duplicate_l_vertex": "merge_l_duplicate",
    "duplicate_r_vertex": "merge_r_duplicate",
    "delete_edge": "add_edge",
    "delete_l_vertex": "add_l_vertex",
    "delete_l_leaf": "add_l_leaf",
}
INVERSE.update({v: k for k, v in list(INVERSE.items())})


def _drop_left(g: BipartiteGraph, i: int) -> Reduction:
    lm = {v: (v if v < i else v - 1) for v in range(1, g.m + 1)}
    lm[i] = None
    es = frozenset((lm[a], b) for a, b in g.edges if a != i)
    return Reduction(BipartiteGraph(g.m - 1, g.n, es), lm, {j: j for j in range(1, g.n + 1)})


def _drop_right(g: BipartiteGraph, j: int) -> Reduction:
    rm = {v: (v if v < j else v - 1) for v in range(1, g.n + 1)}
    rm[j] = None
    es = frozenset((a, rm[b]) for a, b in g.edges if b != j)
    return Reduction(BipartiteGraph(g.m, g.n - 1, es), {i: i for i in range(1, g.m + 1)}, rm)


def _insert_left(g: BipartiteGraph, nbrs, at) -> Reduction:
    at = g.m + 1 if at is None else at
    if not (1 <= at <= g.m + 1):
        raise GraphError(f"insert position {at} outside 1..{g.m + 1}")
    for j in nbrs:
        g._check_right(j)
    lm = {v: (v if v < at else v + 1) for v in range(1, g.m + 1)}
    es = {(lm[a], b) for a, b in g.edges} | {(at, j) for j in nbrs}
    return Reduction(BipartiteGraph(g.m + 1, g.n, frozenset(es)), lm, {j: j for j in range(1, g.n + 1)})


def _insert_right(g: BipartiteGraph, nbrs, at) -> Reduction:
    at = g.n + 1 if at is None else at
    if not (1 <= at <= g.n + 1):
        raise GraphError(f"insert position {at} outside 1..{g.n + 1}")
    for i in nbrs:
        g._check_left(i)
    rm = {v: (v if v < at else v + 1) for v in range(1, g.n + 1)}
    es = {(a, rm[b]) for a, b in g.edges} | {(i, at) for i in nbrs}
    return Reduction(BipartiteGraph(g.m, g.n + 1, frozenset(es)), {i: i for i in range(1, g.m + 1)}, rm)


def apply_reduction(g: BipartiteGraph, op: str, *args, at: int | None = None) -> Reduction:
    """Apply one reduction rule or its inverse; `at` picks where inserted vertices land."""
    ident_l = {i: i for i in range(1, g.m + 1)}
    ident_r = {j: j for j in range(1, g.n + 1)}
    if op == "delete_r_leaf":
        (j,) = args
        if len(g.nbrs_right(j)) > 1:
            raise GraphError(f"delete_r_leaf: right vertex {j} has degree {len(g.right_nbrs[j])} > 1")
        return _drop_right(g, j)
    if op == "add_r_leaf":
        i = args[0] if args else None
        return _insert_right(g, [] if i is None else [i], at)
    if op == "duplicate_l_vertex":
        (i,) = args
        return _insert_left(g, g.nbrs_left(i), at)
    if op == "merge_l_duplicate":
        (i,) = args
        nb = g.nbrs_left(i)
        if not any(k != i and g.left_nbrs[k] == nb for k in range(1, g.m + 1)):
            raise GraphError(f"merge_l_duplicate: left vertex {i} has no twin")
        return _drop_left(g, i)
    if op == "duplicate_r_vertex":
        j = args[0]
        nb = g.nbrs_right(j) if len(args) < 2 or args[1] is None else frozenset(args[1])
        if not nb <= g.nbrs_right(j):
            raise GraphError(f"duplicate_r_vertex: {sorted(nb)} not within N({j})")
        return _insert_right(g, nb, at)
    if op == "merge_r_duplicate":
        (j,) = args
        nb = g.nbrs_right(j)
        if not any(k != j and nb <= g.right_nbrs[k] for k in range(1, g.n + 1)):
            raise GraphError(f"merge_r_duplicate: N({j}) is not inside another right neighbourhood")
        return _drop_right(g, j)
    if op in ("delete_edge", "add_edge"):
        i, j = args
        g._check_left(i)
        g._check_right(j)
        present = (i, j) in g.edges
        if op == "delete_edge" and not present:
            raise GraphError(f"delete_edge: ({i},{j}) not an edge")
        if op == "add_edge" and present:
            raise GraphError(f"add_edge: ({i},{j}) already present")
        es = g.edges - {(i, j)} if op == "delete_edge" else g.edges | {(i, j)}
        h = BipartiteGraph(g.m, g.n, es)
        if base_graph(h) != base_graph(g):
            raise GraphError(f"{op}: ({i},{j}) changes the base graph")
        return Reduction(h, ident_l, ident_r)
    if op == "delete_l_vertex":
        (i,) = args
        g._check_left(i)
        return _drop_left(g, i)
    if op == "add_l_vertex":
        nbrs = args[0] if args else ()
        return _insert_left(g, sorted(set(nbrs)), at)
    if op == "delete_l_leaf":
        (i,) = args
        if len(g.nbrs_left(i)) > 1:
            raise GraphError(f"delete_l_leaf: left vertex {i} has degree {len(g.left_nbrs[i])} > 1")
        return _drop_left(g, i)
    if op == "add_l_leaf":
        j = args[0] if args else None
        return _insert_left(g, [] if j is None else [j], at)
    raise GraphError(f"unknown reduction {op!r}")


def _next_gap_preserving_step(g: BipartiteGraph):
    for i in range(1, g.m + 1):
        if len(g.left_nbrs[i]) <= 1:
            return ("delete_l_leaf", i)
    for j in range(1, g.n + 1):
        if len(g.right_nbrs[j]) <= 1:
            return ("delete_r_leaf", j)
    for i in range(g.m, 0, -1):
        if any(g.left_nbrs[k] == g.left_nbrs[i] for k in range(1, i)):
            return ("merge_l_duplicate", i)
    for j in range(g.n, 0, -1):
        nb = g.right_nbrs[j]
        for k in range(1, g.n + 1):
            if k == j:
                continue
            # equal neighbourhoods: drop the later copy only
            if nb < g.right_nbrs[k] or (nb == g.right_nbrs[k] and k < j):
                return ("merge_r_duplicate", j)
    return None


def reduce_graph(g: BipartiteGraph) -> tuple[BipartiteGraph, list[tuple]]:
    """Exhaustively apply the rules that preserve gap status in both directions."""
    steps = []
    while True:
        step = _next_gap_preserving_step(g)
        if step is None:
            return g, steps
        g = apply_reduction(g, *step).graph
        steps.append(step)


@dataclass(frozen=True)
class GapDecision:
    verdict: str            # gapless | gapful | unknown
    reason: str
    witness: tuple = ()
    steps: tuple = ()


def gap_decision(g: BipartiteGraph) -> GapDecision:
    """Classify whether the commuting tight region equals the abstract one."""
    reduced, steps = reduce_graph(g)
    if not reduced.edges:
        return GapDecision("gapless", "leaf and duplicate reductions empty the graph", (), tuple(steps))
    d = base_graph(g)
    if d.is_forest():
        return GapDecision("gapless", "base graph is a forest", (), tuple(steps))
    # reductions only delete, so anything cyclic in `reduced` is cyclic in g already
    cyc = find_cyclic_subgraphs(g)
    if cyc:
        c = cyc[0]
        return GapDecision("gapful", f"contains a {c.length}-cyclic subgraph", c.left, tuple(steps))
    if not d.is_chordal():
        return GapDecision("gapful", "base graph has an induced cycle of length >= 4", (), tuple(steps))
    return GapDecision("unknown", "chordal base graph whose triangles all share a qudit", (), tuple(steps))
