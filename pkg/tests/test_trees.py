import random
from fractions import Fraction as F
from math import lcm

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearerlab.graphs import BipartiteGraph, base_graph
from shearerlab.shearer import shearer_check
from shearerlab.trees import (
    TreeError, regular_tree, regular_tree_threshold, rooted_tree, tree_boundary_scale,
    tree_dim_recursion, tree_fixed_point,
)

TOL = F(1, 10**9)
# j0 - i1 - j1 - i2 - j2
CHAIN = BipartiteGraph.from_edges(2, 3, [(1, 1), (1, 2), (2, 2), (2, 3)])
# root j0 with two left children, each holding a private leaf
STAR = BipartiteGraph.from_edges(2, 3, [(1, 1), (1, 2), (2, 1), (2, 3)])
SINGLE = BipartiteGraph.from_edges(1, 1, [(1, 1)])


def random_tree(rng, m):
    edges, n = [(1, 1)], 1
    left = 1
    while left < m:
        if rng.random() < 0.6:
            left += 1
            edges.append((left, rng.randint(1, n)))
        else:
            n += 1
            edges.append((rng.randint(1, left), n))
    return BipartiteGraph.from_edges(m, n, edges)


def test_fixed_point_examples():
    sol = tree_fixed_point(rooted_tree(CHAIN, 1), [F(1, 4), F(1, 4)])
    assert sol.feasible and sol.q[2] == F(1, 4) and sol.q[1] == F(1, 3)
    sol = tree_fixed_point(rooted_tree(STAR, 1), [F(1, 2), F(1, 2)])
    assert not sol.feasible and sol.failing == 1 and sol.q[1] == 1
    assert tree_fixed_point(rooted_tree(SINGLE), ["0.999"]).feasible


def test_dim_recursion_examples():
    view = rooted_tree(STAR, 1)
    sol = tree_dim_recursion(view, [F(1, 2), F(1, 2)], {1: 2})
    assert not sol.feasible and sol.q[1] == 2
    sol = tree_dim_recursion(view, [F(1, 2), F(1, 2)], {"1": 3})
    assert sol.feasible and sol.q[1] == 2
    one = BipartiteGraph.from_edges(1, 1, [(1, 1)])
    sol = tree_dim_recursion(rooted_tree(one), [F(1, 2)], {1: 3})
    assert sol.feasible and sol.q[1] == 1


def test_dim_recursion_needs_internal_dims():
    with pytest.raises(TreeError):
        tree_dim_recursion(rooted_tree(CHAIN, 1), [F(1, 4)] * 2, {1: 4})


def test_regular_thresholds():
    assert regular_tree_threshold(2, 2) == F(1, 4)
    assert regular_tree_threshold(3, 2) == F(1, 8)
    assert regular_tree_threshold(2, 3) == F(4, 27)


def test_boundary_scales():
    assert abs(tree_boundary_scale(rooted_tree(STAR, 1), [F(1, 4)] * 2, TOL) - 2) <= TOL
    assert abs(tree_boundary_scale(rooted_tree(SINGLE), [F(1, 2)], TOL) - 2) <= TOL
    assert abs(tree_boundary_scale(rooted_tree(CHAIN, 1), [F(1, 4)] * 2, TOL) - 2) <= TOL


def test_rejects_non_trees():
    with pytest.raises(TreeError):
        rooted_tree(BipartiteGraph.cycle(4))
    with pytest.raises(TreeError):
        rooted_tree(CHAIN, root=7)


def test_left_root_gets_fresh_right_parent():
    lone = BipartiteGraph.from_edges(1, 0, [])
    view = rooted_tree(lone)
    assert view.root == 1 and view.padded


def test_regular_tree_shape():
    g = regular_tree(3, 2, 2)
    assert g.is_tree() and g.m == 3 and g.n == 4
    degrees = sorted(len(g.left_nbrs[i]) for i in range(1, g.m + 1))
    assert degrees == [2, 2, 2]


@given(st.integers(0, 10**6), st.integers(1, 8))
@settings(max_examples=150, deadline=None)
def test_agrees_with_shearer(seed, m):
    rng = random.Random(seed)
    g = random_tree(rng, m)
    r = [F(rng.randint(1, 12), 24) for _ in range(m)]
    for root in (1, g.n):
        view = rooted_tree(g, root)
        assert tree_fixed_point(view, r).feasible == shearer_check(base_graph(g), r).in_bound


@given(st.integers(0, 10**6), st.integers(1, 6))
@settings(max_examples=100, deadline=None)
def test_decreasing_weights_keeps_feasibility(seed, m):
    rng = random.Random(seed)
    view = rooted_tree(random_tree(rng, m))
    r = [F(rng.randint(1, 12), 24) for _ in range(m)]
    lower = [x * F(rng.randint(1, 4), 4) for x in r]
    if tree_fixed_point(view, r).feasible:
        assert tree_fixed_point(view, lower).feasible


@given(st.integers(0, 10**6), st.integers(1, 6))
@settings(max_examples=400, deadline=None)
def test_dim_recursion_converges(seed, m):
    rng = random.Random(seed)
    view = rooted_tree(random_tree(rng, m))
    r = [F(rng.randint(1, 6), rng.choice((2, 3, 4, 6))) for _ in range(m)]
    r = [min(x, F(1)) for x in r]
    base = lcm(*(x.denominator for x in r))
    rational = tree_fixed_point(view, r).feasible
    verdicts = []
    for L in (1, 4, 16):
        dims = {j: L * base for j in view.postorder}
        verdicts.append(tree_dim_recursion(view, r, dims).feasible)
    if rational:
        # floors only shrink q, so rational feasibility carries over
        assert all(verdicts)
    # refining the dimensions never restores feasibility
    assert verdicts == sorted(verdicts, reverse=True)
