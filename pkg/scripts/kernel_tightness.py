"""Boundary instances hit the independence polynomial exactly.

Random in-bound weight vectors on small interaction graphs are turned into
explicit subspace instances; the kernel's relative dimension is measured by
rank and compared with I(G_D, r).  The generic column is a fully random
instance on the same dimensions: no choice of subspaces has a smaller
kernel, and none can go below I.
"""

import argparse
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from shearerlab.config import CapExceeded, limits
from shearerlab.graphs import BipartiteGraph, base_graph
from shearerlab.qlll import ConstructionError, _generic, construct_boundary_instance, verify_span
from shearerlab.shearer import shearer_check


@dataclass
class Config:
    trials: int = 20
    seed: int = 0
    max_left: int = 4
    max_right: int = 3


def random_graph(rng, cfg):
    m, n = rng.randint(1, cfg.max_left), rng.randint(1, cfg.max_right)
    edges = {(i, rng.randint(1, n)) for i in range(1, m + 1)}
    edges |= {(rng.randint(1, m), rng.randint(1, n)) for _ in range(rng.randint(0, m))}
    return BipartiteGraph.from_edges(m, n, sorted(edges))


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    done = 0
    while done < cfg.trials:
        g = random_graph(rng, cfg)
        r = [Fraction(rng.randint(1, 3), rng.choice((4, 5, 6))) for _ in range(g.m)]
        verdict = shearer_check(base_graph(g), r)
        if not verdict.in_bound:
            continue
        start = time.perf_counter()
        try:
            inst = construct_boundary_instance(g, r, seed=rng.randint(0, 2**31))
        except (CapExceeded, ConstructionError) as exc:
            print(f"skip m={g.m} n={g.n}: {exc}")
            continue
        rep = verify_span(inst)
        generic = verify_span(_generic(g, r, inst.dims, rng, limits()))
        elapsed = time.perf_counter() - start
        mark = "ok" if rep.kernel_relative_dim == verdict.full_value else "MISMATCH"
        print(f"m={g.m} n={g.n} dims={list(inst.dims)!s:<14} I={str(verdict.full_value):<8} "
              f"kernel={str(rep.kernel_relative_dim):<8} generic={str(generic.kernel_relative_dim):<8} "
              f"{rep.method:<7} {elapsed:5.2f}s {mark}")
        done += 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    main(Config(**vars(ap.parse_args())))
