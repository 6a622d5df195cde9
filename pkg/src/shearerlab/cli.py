"""Command-line front end: one subcommand per operation, JSON on stdout.

Exit status 0 on success, 1 on a domain error, 2 on a usage error.  Errors are
written to stderr as {"error": {"code": ..., "message": ...}}.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import events as ev
from . import gaps, qlll, shearer, trees
from .config import DEFAULT_TOL, CapExceeded
from .graphs import (
    BipartiteGraph, DependencyGraph, GraphError, apply_reduction, as_dependency,
    find_cyclic_subgraphs, gap_decision, reduce_graph,
)
from .rationals import dec, fmt, parse_vector, to_fraction


class UsageError(Exception):
    pass


def rational(q: Fraction) -> dict:
    return {"value": fmt(q), "decimal": dec(q)}


def vector(v) -> list[str]:
    return [fmt(x) for x in v]


# ------------------------------------------------------------------ inputs

def _load_json(text: str):
    text = text.strip()
    if text.startswith(("{", "[")):
        return json.loads(text)
    path = Path(text)
    if not path.exists():
        raise UsageError(f"no such file: {text}")
    return json.loads(path.read_text())


def load_graph(spec: str):
    """A file path, an inline JSON object, or cycle:L / path:M / complete:M."""
    if ":" in spec and not spec.strip().startswith("{") and not Path(spec).exists():
        kind, _, arg = spec.partition(":")
        try:
            size = int(arg)
        except ValueError:
            raise UsageError(f"bad graph shorthand {spec!r}")
        if kind == "cycle":
            return BipartiteGraph.cycle(size)
        if kind == "path":
            return DependencyGraph.path(size)
        if kind == "complete":
            return DependencyGraph.complete(size)
        raise UsageError(f"unknown graph shorthand {kind!r}")
    obj = _load_json(spec)
    if "n" in obj:
        return BipartiteGraph.from_json(obj)
    return DependencyGraph.from_json(obj)


def _bipartite(g) -> BipartiteGraph:
    if not isinstance(g, BipartiteGraph):
        raise UsageError("this command needs an interaction bipartite graph (JSON with m, n, edges)")
    return g


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(t) for t in text.replace(" ", "").split(",") if t]


# ---------------------------------------------------------------- commands

def cmd_indpoly(a):
    g = load_graph(a.graph)
    r = parse_vector(a.r)
    poly = shearer.IndependencePolynomial(g, r)
    S = _ints(a.subset) if a.subset is not None else None
    out = {"value": fmt(poly(S)), "decimal": dec(poly(S))}
    if a.proper_subsets:
        d = as_dependency(g)
        out["proper_subsets"] = [
            {"subset": list(shearer.mask_to_set(mask)), "value": fmt(poly.of_mask(mask))}
            for mask in range(1, (1 << d.m) - 1)
        ]
    return out


def cmd_shearer(a):
    v = shearer.shearer_check(load_graph(a.graph), parse_vector(a.r))
    return {
        "in_bound": v.in_bound,
        "witness": list(v.witness) if v.witness else None,
        "value": fmt(v.value),
        "value_decimal": dec(v.value),
    }


def cmd_threshold(a):
    return rational(shearer.symmetric_threshold(load_graph(a.graph), a.tol))


def cmd_scale(a):
    return rational(shearer.boundary_scale(load_graph(a.graph), parse_vector(a.r), a.tol))


def _tree_view(a):
    g = _bipartite(load_graph(a.graph))
    extra = _load_json(a.tree) if getattr(a, "tree", None) else {}
    root = a.root if a.root is not None else extra.get("root")
    return trees.rooted_tree(g, root), extra


def _solution(sol, rationals_out=True):
    q = {str(j): (fmt(v) if rationals_out else v) for j, v in sorted(sol.q.items())}
    return {"feasible": sol.feasible, "failing": sol.failing, "q": q}


def cmd_tree_bound(a):
    view, _ = _tree_view(a)
    out = _solution(trees.tree_fixed_point(view, parse_vector(a.r)))
    out["root"] = view.root
    out["padded"] = list(view.padded)
    if a.scale:
        out["scale"] = rational(trees.tree_boundary_scale(view, parse_vector(a.r), a.tol))
    return out


def cmd_tree_dim(a):
    view, extra = _tree_view(a)
    dims = dict(extra.get("dims", {}))
    if a.dims:
        dims.update(json.loads(a.dims))
    out = _solution(trees.tree_dim_recursion(view, parse_vector(a.r), dims), rationals_out=False)
    out["root"] = view.root
    return out


def cmd_regular_tree(a):
    out = {"threshold": rational(trees.regular_tree_threshold(a.t, a.k))}
    if a.depth is not None:
        g = trees.regular_tree(a.t, a.k, a.depth)
        p = to_fraction(a.p) if a.p is not None else trees.regular_tree_threshold(a.t, a.k) - Fraction(1, 10**6)
        sol = trees.tree_fixed_point(trees.rooted_tree(g), [p] * g.m)
        verdict = shearer.shearer_check(g, [p] * g.m)
        out["truncation"] = {
            "depth": a.depth, "m": g.m, "n": g.n, "p": fmt(p),
            "tree_feasible": sol.feasible, "shearer_in_bound": verdict.in_bound,
            "agree": sol.feasible == verdict.in_bound,
        }
    return out


def _report(rep: qlll.SpanReport) -> dict:
    return {
        "total_dim": rep.total_dim, "span_dim": rep.span_dim,
        "kernel_relative_dim": fmt(rep.kernel_relative_dim),
        "kernel_decimal": dec(rep.kernel_relative_dim),
        "method": rep.method, "primes": list(rep.primes), "certified": rep.certified,
    }


def _write_instance(inst, path):
    data = inst.to_json()
    if path:
        Path(path).write_text(json.dumps(data) + "\n")
        return path
    return data


def cmd_construct(a):
    g = _bipartite(load_graph(a.graph))
    r = parse_vector(a.r)
    build = qlll.construct_spanning_instance if a.mode == "span" else qlll.construct_boundary_instance
    inst = build(g, r, a.seed, minimize=not a.no_minimize)
    return {
        "mode": a.mode, "seed": a.seed, "dims": list(inst.dims), "total_dim": inst.total_dim,
        "report": _report(qlll.verify_span(inst, a.rank_mode)),
        "instance": _write_instance(inst, a.out),
    }


def _load_instance(spec):
    return qlll.SubspaceInstance.from_json(_load_json(spec))


def cmd_verify(a):
    return _report(qlll.verify_span(_load_instance(a.instance), a.mode))


def cmd_pad(a):
    inst = qlll.pad_dims(_load_instance(a.instance), _ints(a.dims))
    return {"dims": list(inst.dims), "instance": _write_instance(inst, a.out)}


def cmd_tau(a):
    return fmt(gaps.tau(a.d, a.l, to_fraction(a.p), to_fraction(a.q)))


def cmd_transfer(a):
    g = load_graph(a.graph)
    fn = gaps.path_transfer if a.path else gaps.element_transfer
    out = fn(g, parse_vector(a.p), a.i, a.j, to_fraction(a.q))
    return {"p": vector(out), "beyond": not shearer.in_bound(g, out)}


def cmd_gap_formula(a):
    if a.variant == "transfer-bound":
        if a.p is None or a.q1 is None or a.layers is None:
            raise UsageError("transfer-bound needs --p, --q1 and --layers")
        return rational(gaps.transfer_bound(to_fraction(a.p), to_fraction(a.q1), _ints(a.layers)))
    if a.variant == "radius":
        if a.l is None or a.P is None:
            raise UsageError("radius needs --l and --P")
    elif a.delta is None or a.l is None or a.P is None:
        raise UsageError("degree needs --delta, --l and --P")
    return rational(gaps.generic_gap_bound(a.delta or 0, a.l, to_fraction(a.P), a.variant))


def cmd_lattice_table(a):
    rows = gaps.lattice_gap_table(a.q1_rule)
    if a.format == "text":
        return "\n".join(f"{r.lattice:<13} P_A={dec(r.P_A, 11):<14} gap>={r.decimal()}" for r in rows)
    return [
        {"lattice": r.lattice, "P_A": dec(r.P_A), "q1_rule": r.q1_rule, "layers": list(r.layers),
         "lower_bound_on_gap": r.decimal(), "exact": fmt(r.lower_bound_on_gap)}
        for r in rows
    ]


def cmd_reduce(a):
    g = _bipartite(load_graph(a.graph))
    if a.op:
        red = apply_reduction(g, a.op, *_ints(a.args), at=a.at)
        return {"graph": red.graph.to_json(),
                "left_map": {str(k): v for k, v in red.left_map.items()},
                "right_map": {str(k): v for k, v in red.right_map.items()}}
    reduced, steps = reduce_graph(g)
    return {"graph": reduced.to_json(), "steps": [list(s) for s in steps]}


def cmd_gap_decision(a):
    g = _bipartite(load_graph(a.graph))
    dec_ = gap_decision(g)
    return {"verdict": dec_.verdict, "reason": dec_.reason, "witness": list(dec_.witness),
            "cyclic_subgraphs": [{"left": list(c.left), "length": c.length, "two_discrete": c.two_discrete}
                                 for c in find_cyclic_subgraphs(g)]}


def cmd_extremal(a):
    g = load_graph(a.graph)
    p = parse_vector(a.p)
    mu = shearer.extremal_distribution(g, p)
    system = ev.extremal_event_system(g, p)
    return {
        "masses": [{"set": list(s), "mass": fmt(x)} for s, x in mu.items()],
        "total": fmt(sum(mu.values())),
        "avoid_all": fmt(ev.avoid_all_probability(system)),
        "ind_poly": fmt(shearer.ind_poly(g, p)),
    }


def cmd_events_check(a):
    if a.lemmas:
        rep = ev.verify_monotone_lemmas(a.lemmas)
        return {"lemmas_ok": rep.ok, "pairs": rep.pairs, "correlation_checks": rep.correlation_checks}
    if not a.system:
        raise UsageError("events-check needs --system or --lemmas")
    system = ev.DiscreteEventSystem.from_json(_load_json(a.system))
    out = {"m": system.m, "n": system.n}
    bad = ev.standard_violation(system)
    out["standard"] = bad is None
    if bad is not None:
        out["standard_violation"] = {"variable": bad[0], "reason": bad[1]}
    g = load_graph(a.graph) if a.graph else system.graph()
    lops = ev.lopsidependency_check(system, g)
    out["lopsidependency"] = {"ok": lops.ok, "counterexample": _counter(lops)}
    if a.plan is not None:
        plan = [tuple(_ints(c)) for c in a.plan.split(";") if c.strip()]
        cut = ev.cut_events(system, plan)
        out["cut_system"] = cut.to_json()
        if bad is None:
            rep = ev.verify_cutting_properties(system, plan)
            out["cutting"] = {
                "ok": rep.ok, "union_preserved": rep.union_preserved,
                "lopsidependency": rep.lopsidependency.ok,
                "correlation_failures": [list(x) for x in rep.correlation_failures],
                "union_correlation_failures": [[list(k1), list(k2)] for k1, k2 in rep.union_correlation_failures],
            }
    return out


def _counter(v):
    if v.counterexample is None:
        return None
    i, K = v.counterexample
    return {"i": i, "K": list(K)}


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shearerlab", description="Shearer-bound and local lemma workbench")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    def tol(sp):
        sp.add_argument("--tol", type=to_fraction, default=DEFAULT_TOL)

    sp = add("indpoly", cmd_indpoly, "independence polynomial value")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--r", required=True)
    sp.add_argument("--subset")
    sp.add_argument("--proper-subsets", action="store_true")

    sp = add("shearer", cmd_shearer, "Shearer-bound membership with witness")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--r", required=True)

    sp = add("threshold", cmd_threshold, "symmetric critical value")
    sp.add_argument("--graph", required=True)
    tol(sp)

    sp = add("scale", cmd_scale, "boundary scale factor for a direction r")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--r", required=True)
    tol(sp)

    for name, fn, text in (("tree-bound", cmd_tree_bound, "rational tree recursion"),
                           ("tree-dim", cmd_tree_dim, "integer-dimension tree recursion")):
        sp = add(name, fn, text)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--r", required=True)
        sp.add_argument("--root", type=int)
        sp.add_argument("--tree", help='JSON {"root": j, "dims": {...}} or a file')
        if name == "tree-bound":
            sp.add_argument("--scale", action="store_true")
            tol(sp)
        else:
            sp.add_argument("--dims", help='JSON object like {"1": 2}')

    sp = add("regular-tree", cmd_regular_tree, "regular-tree threshold and truncation check")
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--p")

    sp = add("construct", cmd_construct, "explicit subspace instance")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--r", required=True)
    sp.add_argument("--mode", choices=("span", "boundary"), required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--rank-mode", choices=("exact", "modular"))
    sp.add_argument("--no-minimize", action="store_true")
    sp.add_argument("--out")

    sp = add("verify", cmd_verify, "rank of the sum of an instance's subspaces")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--mode", choices=("exact", "modular"))

    sp = add("pad", cmd_pad, "enlarge qudit dimensions by orthogonal copies")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--dims", required=True)
    sp.add_argument("--out")

    sp = add("tau", cmd_tau, "uniform transfer amount")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)

    sp = add("transfer", cmd_transfer, "probability transfer between events")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--p", required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--q", required=True)
    sp.add_argument("--path", action="store_true", help="along a shortest path instead of one edge")

    sp = add("gap-formula", cmd_gap_formula, "closed-form gap lower bounds")
    sp.add_argument("--variant", choices=("degree", "radius", "transfer-bound"), default="degree")
    sp.add_argument("--delta", type=int)
    sp.add_argument("--l", type=int)
    sp.add_argument("--P")
    sp.add_argument("--p")
    sp.add_argument("--q1")
    sp.add_argument("--layers")

    sp = add("lattice-table", cmd_lattice_table, "gap lower bounds on common lattices")
    sp.add_argument("--q1-rule", choices=tuple(gaps.Q1_RULES), default="p^3/2")
    sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = add("reduce", cmd_reduce, "apply reduction rules")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--op")
    sp.add_argument("--args")
    sp.add_argument("--at", type=int)

    sp = add("gap-decision", cmd_gap_decision, "classify gapless / gapful / unknown")
    sp.add_argument("--graph", required=True)

    sp = add("extremal", cmd_extremal, "extremal measure over independent sets")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--p", required=True)

    sp = add("events-check", cmd_events_check, "event-system oracle checks")
    sp.add_argument("--system")
    sp.add_argument("--graph")
    sp.add_argument("--plan", help="cuts as k,i;k,i")
    sp.add_argument("--lemmas", type=int, metavar="NVARS")
    return p


DOMAIN_ERRORS = (
    shearer.ShearerError, GraphError, qlll.ConstructionError, gaps.TransferError,
    ev.EventError, ZeroDivisionError,
)


def _fail(code: str, message: str, status: int) -> int:
    print(json.dumps({"error": {"code": code, "message": message}}), file=sys.stderr)
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = args.fn(args)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except json.JSONDecodeError as exc:
        return _fail("malformed_input", str(exc), 2)
    except CapExceeded as exc:
        return _fail("cap_exceeded", str(exc), 1)
    except DOMAIN_ERRORS as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    except (KeyError, TypeError, ValueError) as exc:
        return _fail("malformed_input", str(exc), 2)
    if isinstance(result, str) and args.command == "lattice-table":
        print(result)
    else:
        print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
