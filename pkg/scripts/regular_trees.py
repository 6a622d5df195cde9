"""Critical thresholds of (t,k)-regular trees against finite truncations.

For each (t, k) the closed-form threshold is compared with the symmetric
threshold of a depth-limited truncation, found by bisecting the tree
recursion.  Truncations sit above the infinite-tree value and approach it
as depth grows.
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from shearerlab.shearer import _bisect
from shearerlab.trees import regular_tree, regular_tree_threshold, rooted_tree, tree_fixed_point


@dataclass
class Config:
    max_t: int = 4
    max_k: int = 3
    depths: tuple = (2, 4, 6)
    tol: Fraction = Fraction(1, 10**8)


def truncated_threshold(t, k, depth, tol):
    g = regular_tree(t, k, depth)
    view = rooted_tree(g)
    return _bisect(lambda p: not tree_fixed_point(view, [p] * g.m).feasible, Fraction(0), Fraction(1), tol), g.m


def main(cfg: Config):
    print(f"{'t':>2} {'k':>2} {'exact':>10}  " + "  ".join(f"depth {d:<2} (m)" for d in cfg.depths))
    for t in range(2, cfg.max_t + 1):
        for k in range(2, cfg.max_k + 1):
            exact = regular_tree_threshold(t, k)
            cells = []
            for depth in cfg.depths:
                p, m = truncated_threshold(t, k, depth, cfg.tol)
                assert p >= exact - cfg.tol
                cells.append(f"{float(p):.6f} ({m})")
            print(f"{t:>2} {k:>2} {float(exact):>10.6f}  " + "  ".join(f"{c:<14}" for c in cells))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-t", type=int, default=4)
    ap.add_argument("--max-k", type=int, default=3)
    ap.add_argument("--depths", type=int, nargs="+", default=[2, 4, 6])
    a = ap.parse_args()
    main(Config(a.max_t, a.max_k, tuple(a.depths)))
