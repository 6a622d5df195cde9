"""End-to-end acceptance checks, one per headline claim.

Each test prints a PASS/FAIL line (visible without -s) and asserts its runtime
budget as well as its numbers.
"""

import io
import json
import random
import time
from contextlib import redirect_stdout
from fractions import Fraction as F
from itertools import combinations

import pytest

from shearerlab import cli
from shearerlab.events import (
    avoid_all_probability, extremal_event_system, random_compatible_plan,
    random_standard_system, verify_cutting_properties, verify_monotone_lemmas,
)
from shearerlab.gaps import TransferError, element_transfer, generic_gap_bound, tau
from shearerlab.graphs import BipartiteGraph, DependencyGraph, base_graph
from shearerlab.qlll import LocalSubspace, SubspaceInstance, sample_random_subspace, verify_span
from shearerlab.shearer import extremal_distribution, ind_poly, shearer_check
from shearerlab.trees import regular_tree, regular_tree_threshold, rooted_tree, tree_fixed_point

C4 = BipartiteGraph.cycle(4)
TABLE = {"square": 5.943e-8, "hexagonal": 1.211e-7, "triangular": 6.199e-8, "simple cubic": 9.533e-10}


@pytest.fixture
def report(capsys):
    def run(number, title, budget, check):
        start = time.perf_counter()
        err = None
        try:
            detail = check()
        except AssertionError as exc:
            err, detail = exc, str(exc)
        elapsed = time.perf_counter() - start
        ok = err is None and elapsed < budget
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n[{status}] criterion {number}: {title} ({elapsed:.2f}s / {budget}s) {detail or ''}")
        if err is not None:
            raise err
        assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"

    return run


def run_cli(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        status = cli.main(list(argv))
    assert status == 0, f"exit status {status}"
    return json.loads(buf.getvalue())


def test_c4_exact_zero(report):
    def check():
        r = [F(1, 3), F(1, 3), F(1, 4), F(1, 4)]
        out = run_cli("indpoly", "--graph", "cycle:4", "--r", "1/3,1/3,1/4,1/4", "--proper-subsets")
        assert out["value"] == "0/1"
        assert all(F(row["value"]) > 0 for row in out["proper_subsets"])
        assert len(out["proper_subsets"]) == 14
        assert ind_poly(base_graph(C4), r) == 0
        return "I = 0, 14 proper subsets positive"

    report(1, "4-cyclic exactness", 0.1, check)


def test_lattice_table(report):
    def check():
        rows = run_cli("lattice-table")
        errs = {}
        for row in rows:
            got = float(F(row["exact"]))
            errs[row["lattice"]] = abs(got - TABLE[row["lattice"]]) / TABLE[row["lattice"]]
        assert set(errs) == set(TABLE)
        assert max(errs.values()) < 0.005, errs
        return " ".join(f"{k}:{v:.2%}" for k, v in errs.items())

    report(2, "lattice gap table", 1.0, check)


def test_square_generic(report):
    def check():
        p = F("0.11933888188")
        t = float(tau(4, 4, p, p**3))
        assert abs(t - 5.057e-9) / 5.057e-9 < 0.005, t
        g = float(generic_gap_bound(4, 4, p, "degree"))
        assert 2.8e-10 / 1.2 <= g <= 2.8e-10 * 1.2, g
        return f"tau={t:.4e} closed form={g:.3e}"

    report(3, "square-lattice generic bounds", 0.1, check)


def test_regular_trees(report):
    def check():
        assert regular_tree_threshold(2, 2) == F(1, 4)
        assert regular_tree_threshold(3, 2) == F(1, 8)
        g = regular_tree(3, 2, 5)
        p = F(1, 8) - F(1, 10**6)
        feasible = tree_fixed_point(rooted_tree(g), [p] * g.m).feasible
        agrees = shearer_check(base_graph(g), [p] * g.m).in_bound
        assert feasible and agrees == feasible
        return f"depth-5 truncation m={g.m}: feasible, shearer agrees"

    report(4, "regular-tree thresholds", 5.0, check)


def test_span_construction(report):
    def check():
        out = run_cli("construct", "--graph", "cycle:4", "--r", "1/3,1/3,1/4,1/4",
                      "--mode", "span", "--seed", "1", "--rank-mode", "exact")
        rep = out["report"]
        assert rep["method"] == "exact" and rep["kernel_relative_dim"] == "0/1"
        assert out["total_dim"] <= 2**12
        inst = SubspaceInstance.from_json(out["instance"])
        assert inst.relative_dims() == (F(1, 3), F(1, 3), F(1, 4), F(1, 4))
        return f"dims={out['dims']} total={out['total_dim']}"

    report(5, "beyond-bound spanning instance", 60.0, check)


def test_boundary_construction(report):
    def check():
        out = run_cli("construct", "--graph", "cycle:4", "--r", "0.3,0.3,0.2,0.2",
                      "--mode", "boundary", "--seed", "1", "--rank-mode", "exact")
        kernel = F(out["report"]["kernel_relative_dim"])
        assert kernel == F(3, 25) == ind_poly(base_graph(C4), [F(3, 10), F(3, 10), F(1, 5), F(1, 5)])
        return f"kernel={kernel} total={out['total_dim']}"

    report(6, "in-bound boundary instance", 60.0, check)


def random_instance(rng):
    while True:
        m, n = rng.randint(1, 5), rng.randint(1, 3)
        edges = {(i, rng.randint(1, n)) for i in range(1, m + 1)}
        edges |= {(rng.randint(1, m), rng.randint(1, n)) for _ in range(rng.randint(0, 4))}
        g = BipartiteGraph.from_edges(m, n, sorted(edges))
        dims = [rng.randint(1, 8) for _ in range(n)]
        local = [1] * m
        for i, j in edges:
            local[i - 1] *= dims[j - 1]
        rows = [rng.randint(1, max(1, w // 2)) for w in local]
        r = [F(k, w) for k, w in zip(rows, local)]
        if shearer_check(base_graph(g), r).in_bound:
            hams = tuple(
                LocalSubspace(tuple(sorted(g.left_nbrs[i])), tuple(map(tuple, sample_random_subspace(w, k, rng))))
                for i, (k, w) in enumerate(zip(rows, local), 1)
            )
            return SubspaceInstance(g, tuple(dims), hams, 0), r


def test_kernel_lower_bound(report):
    def check():
        rng = random.Random(2024)
        worst = None
        for _ in range(100):
            inst, r = random_instance(rng)
            rep = verify_span(inst, "exact")
            bound = ind_poly(base_graph(inst.graph), r)
            assert rep.kernel_relative_dim >= bound, (inst.graph, r, rep)
            slack = rep.kernel_relative_dim - bound
            worst = slack if worst is None else min(worst, slack)
        return f"100 instances, min slack {worst}"

    report(7, "kernel lower bound suite", 300.0, check)


def connected_graphs(m):
    pairs = list(combinations(range(1, m + 1), 2))
    for k in range(len(pairs) + 1):
        for es in combinations(pairs, k):
            d = DependencyGraph.from_edges(m, es)
            if d.is_connected_mask((1 << m) - 1):
                yield d


def in_bound_vector(rng, d):
    while True:
        p = [F(rng.randint(1, 30), 60) for _ in range(d.m)]
        if shearer_check(d, p).in_bound:
            return p


def test_extremal_oracle(report):
    def check():
        rng = random.Random(8)
        graphs = 0
        for m in range(1, 5):
            for d in connected_graphs(m):
                graphs += 1
                for _ in range(50):
                    p = in_bound_vector(rng, d)
                    mu = extremal_distribution(d, p)
                    I = ind_poly(d, p)
                    assert all(x >= 0 for x in mu.values())
                    assert sum(mu.values()) == 1 and mu[()] == I
                    assert avoid_all_probability(extremal_event_system(d, p)) == I
        return f"{graphs} connected graphs x 50 vectors"

    report(8, "extremal distribution oracle", 120.0, check)


def test_transfer_preservation(report):
    def check():
        rng = random.Random(99)
        done = 0
        while done < 200:
            m = rng.randint(2, 8)
            es = [(v, rng.randint(1, v - 1)) for v in range(2, m + 1)]
            es += [tuple(rng.sample(range(1, m + 1), 2)) for _ in range(rng.randint(0, m))]
            d = DependencyGraph.from_edges(m, {tuple(sorted(e)) for e in es})
            p = [F(rng.randint(10, 59), 60) for _ in range(m)]
            if shearer_check(d, p).in_bound:
                continue
            j = rng.randint(1, m)
            i = rng.choice(sorted(d.gamma(j)))
            q = p[j - 1] * F(rng.randint(0, 20), 20)
            try:
                out = element_transfer(d, p, i, j, q)
            except TransferError:
                continue
            assert not shearer_check(d, out).in_bound, (d, p, i, j, q)
            done += 1
        return "200 transfers stay beyond"

    report(9, "element transfer preservation", 120.0, check)


def test_cutting_suite(report):
    def check():
        rng = random.Random(10)
        for _ in range(100):
            system = random_standard_system(rng)
            rep = verify_cutting_properties(system, random_compatible_plan(rng, system))
            assert rep.union_preserved and rep.lopsidependency.ok, rep
        for nvars in (1, 2, 3):
            lem = verify_monotone_lemmas(nvars)
            assert lem.ok, lem
        return "100 cut systems, monotone lemmas over 1-3 variables"

    report(10, "cutting property suite", 120.0, check)
