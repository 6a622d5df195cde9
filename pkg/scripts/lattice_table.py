"""Gap lower bounds for the four lattices under both q1 rules."""

import argparse
from dataclasses import dataclass

from shearerlab.gaps import Q1_RULES, lattice_gap_table
from shearerlab.rationals import dec


@dataclass
class Config:
    digits: int = 4


def main(cfg: Config):
    for rule in Q1_RULES:
        print(f"q1 = {rule}")
        for row in lattice_gap_table(rule):
            bound = f"{float(row.lower_bound_on_gap):.{cfg.digits - 1}e}"
            print(f"  {row.lattice:<13} p={dec(row.P_A, 11):<15} layers={list(row.layers)!s:<18} gap >= {bound}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--digits", type=int, default=4)
    main(Config(**vars(ap.parse_args())))
