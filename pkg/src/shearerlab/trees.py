"""Boundary recursions on tree-shaped interaction graphs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .config import DEFAULT_TOL
from .graphs import BipartiteGraph, GraphError
from .rationals import to_fraction
from .shearer import BoundaryOutOfRange, ShearerError, _bisect, probability_vector


class TreeError(GraphError):
    pass


@dataclass(frozen=True)
class RootedTreeView:
    """A tree rooted at a right vertex whose leaves are all right vertices.

    Right vertices numbered above graph.n are padding added by the view: a
    fresh root when needed and one leaf under every childless left vertex.
    """

    graph: BipartiteGraph
    root: int
    right_count: int
    left_children: dict
    right_children: dict
    postorder: tuple
    padded: tuple

    @property
    def leaves(self) -> tuple:
        return tuple(j for j in self.postorder if not self.right_children[j])


def rooted_tree(g: BipartiteGraph, root: int | None = None) -> RootedTreeView:
    if g.m == 0:
        raise TreeError("tree needs at least one left vertex")
    if not g.is_tree():
        raise TreeError("interaction graph is not a tree (needs connected and |E| = m + n - 1)")
    nxt = g.n
    padded = []
    left_nb = {i: set(g.left_nbrs[i]) for i in range(1, g.m + 1)}
    right_nb = {j: set(g.right_nbrs[j]) for j in range(1, g.n + 1)}
    if g.n == 0:
        # the lone left vertex is the natural root: hang it from a fresh right root
        nxt += 1
        padded.append(nxt)
        left_nb[1].add(nxt)
        right_nb[nxt] = {1}
        root = nxt
    elif root is None:
        root = 1
    elif not (1 <= root <= g.n):
        raise TreeError(f"root must be a right vertex in 1..{g.n}, got {root}")

    left_children, right_children = {}, {}
    order = []

    def visit_right(j, parent):
        kids = tuple(sorted(right_nb[j] - {parent}))
        right_children[j] = kids
        for i in kids:
            visit_left(i, j)
        order.append(j)

    def visit_left(i, parent):
        nonlocal nxt
        kids = sorted(left_nb[i] - {parent})
        if not kids:
            nxt += 1
            padded.append(nxt)
            right_nb[nxt] = {i}
            left_nb[i].add(nxt)
            kids = [nxt]
        left_children[i] = tuple(kids)
        for j in kids:
            visit_right(j, i)

    visit_right(root, None)
    return RootedTreeView(g, root, nxt, left_children, right_children, tuple(order), tuple(padded))


@dataclass(frozen=True)
class TreeBoundSolution:
    feasible: bool
    q: dict
    failing: int | None = None


def tree_fixed_point(view: RootedTreeView, r) -> TreeBoundSolution:
    """q_j = sum over left children i of r_i * prod over i's children k of 1/(1 - q_k)."""
    r = probability_vector(r, view.graph.m)
    q: dict[int, Fraction] = {}
    for j in view.postorder:
        total = Fraction(0)
        for i in view.right_children[j]:
            term = r[i - 1]
            for k in view.left_children[i]:
                term /= 1 - q[k]
            total += term
        q[j] = total
        if total >= 1:
            return TreeBoundSolution(False, q, j)
    return TreeBoundSolution(True, q)


def tree_dim_recursion(view: RootedTreeView, r, dims: dict) -> TreeBoundSolution:
    """Integer recursion with exact floors; feasible iff q_j < d_j everywhere."""
    r = probability_vector(r, view.graph.m)
    d = {}
    for j in view.postorder:
        if j in dims:
            d[j] = int(dims[j])
        elif str(j) in dims:
            d[j] = int(dims[str(j)])
        elif not view.right_children[j]:
            d[j] = 1
        else:
            raise TreeError(f"no dimension given for internal right vertex {j}")
        if d[j] < 1:
            raise TreeError(f"dimension of right vertex {j} must be >= 1")
    q: dict[int, int] = {}
    for j in view.postorder:
        total = 0
        for i in view.right_children[j]:
            term = r[i - 1] * d[j]
            for k in view.left_children[i]:
                term *= Fraction(d[k], d[k] - q[k])
            total += floor(term)
        q[j] = total
        if total >= d[j]:
            return TreeBoundSolution(False, q, j)
    return TreeBoundSolution(True, q)


def regular_tree_threshold(t: int, k: int) -> Fraction:
    """Critical symmetric value on the infinite tree with right degree t and left degree k."""
    if not (isinstance(t, int) and isinstance(k, int)) or t < 2 or k < 2:
        raise ShearerError(f"need integers t, k >= 2, got ({t}, {k})")
    return Fraction(1, t - 1) * Fraction((k - 1) ** (k - 1), k ** k)


def regular_tree(t: int, k: int, depth: int) -> BipartiteGraph:
    """Truncation of the (t,k)-regular tree: a right root and `depth` edge levels.

    The root has t left children, every other right vertex t-1, every left
    vertex k-1 right children.  Truncating at a left level adds its k-1
    right leaves so the leaves are right vertices.
    """
    if depth < 1:
        raise TreeError("depth must be at least 1")
    edges = []
    m, n = 0, 1
    frontier = [("R", 1, t)]
    for _ in range(depth):
        nxt = []
        for kind, v, fan in frontier:
            for _ in range(fan):
                if kind == "R":
                    m += 1
                    edges.append((m, v))
                    nxt.append(("L", m, k - 1))
                else:
                    n += 1
                    edges.append((v, n))
                    nxt.append(("R", n, t - 1))
        frontier = nxt
    if frontier[0][0] == "L":
        for _, v, fan in frontier:
            for _ in range(fan):
                n += 1
                edges.append((v, n))
    return BipartiteGraph.from_edges(m, n, edges)


def tree_boundary_scale(view: RootedTreeView, r, tol=DEFAULT_TOL) -> Fraction:
    r = probability_vector(r, view.graph.m)
    tol = to_fraction(tol)
    if tol <= 0:
        raise ShearerError("tol must be positive")
    hi = 1 / max(r)

    def beyond(lam):
        return not tree_fixed_point(view, [lam * x for x in r]).feasible

    if not beyond(hi):
        raise BoundaryOutOfRange(f"lambda = {hi} already puts an entry at 1 while feasible")
    return _bisect(beyond, Fraction(0), hi, tol)
