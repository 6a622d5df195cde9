"""Fuzz the transfer lemmas and the layered bound.

Counts element transfers that leave the beyond-bound region (expected 0),
and parameter draws where tau exceeds the layered transfer bound (expected 0).
"""

import argparse
import random
from dataclasses import dataclass
from fractions import Fraction

from shearerlab.gaps import TransferError, element_transfer, tau, transfer_bound
from shearerlab.graphs import DependencyGraph
from shearerlab.shearer import shearer_check


@dataclass
class Config:
    transfers: int = 500
    draws: int = 2000
    seed: int = 1


def transfers(rng, count):
    bad = done = 0
    while done < count:
        m = rng.randint(2, 8)
        es = {tuple(sorted((v, rng.randint(1, v - 1)))) for v in range(2, m + 1)}
        es |= {tuple(sorted(rng.sample(range(1, m + 1), 2))) for _ in range(rng.randint(0, m))}
        d = DependencyGraph.from_edges(m, es)
        p = [Fraction(rng.randint(10, 59), 60) for _ in range(m)]
        if shearer_check(d, p).in_bound:
            continue
        j = rng.randint(1, m)
        i = rng.choice(sorted(d.gamma(j)))
        try:
            out = element_transfer(d, p, i, j, p[j - 1] * Fraction(rng.randint(0, 20), 20))
        except TransferError:
            continue
        bad += shearer_check(d, out).in_bound
        done += 1
    return bad


def layered(rng, count):
    bad = 0
    for _ in range(count):
        delta, l = rng.randint(2, 6), rng.randint(1, 5)
        p = Fraction(rng.randint(1, 300), 1000)
        q1 = p * Fraction(rng.randint(1, 20), 20)
        layers = [rng.randint(0, delta * (delta - 1) ** (k - 1)) for k in range(1, l + 1)]
        try:
            bad += tau(delta, l, p, q1) > transfer_bound(p, q1, layers)
        except TransferError:
            pass
    return bad


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    print(f"element transfers that fell inside the bound: {transfers(rng, cfg.transfers)} / {cfg.transfers}")
    print(f"draws with tau above the layered bound:       {layered(rng, cfg.draws)} / {cfg.draws}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--transfers", type=int, default=500)
    ap.add_argument("--draws", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    main(Config(**vars(ap.parse_args())))
