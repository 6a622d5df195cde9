"""Exact and modular rank of integer matrices.

The exact route is fraction-free elimination over the integers, done by
FLINT; the pure-Python Bareiss below is kept as an independent reference.  The modular
route hands a matrix over Z/p to FLINT; full rank modulo any prime already
certifies full rank over the rationals, since reduction mod p cannot raise rank.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm
from typing import Sequence

import flint

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover - plain ints are only slower
    _big = int

PRIME_FLOOR = 1 << 60


def integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each rational row to integers; row scaling never changes rank."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
        if den == 1:
            out.append([int(x) for x in row])
        else:
            out.append([int(x * den) for x in row])
    return out


def bareiss_rank(rows: Sequence[Sequence[int]], ncols: int | None = None) -> int:
    """Rank via fraction-free Gaussian elimination with exact integer division."""
    M = [[_big(x) for x in row] for row in integer_rows(rows)]
    if not M:
        return 0
    cols = len(M[0]) if ncols is None else ncols
    nrows = len(M)
    rank = 0
    prev = _big(1)
    for c in range(cols):
        piv = next((k for k in range(rank, nrows) if M[k][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        top = M[rank]
        pv = top[c]
        for k in range(rank + 1, nrows):
            row = M[k]
            f = row[c]
            if f:
                M[k] = [(x * pv - f * y) // prev for x, y in zip(row, top)]
            else:
                M[k] = [x * pv // prev for x in row]
        prev = pv
        rank += 1
        if rank == nrows:
            break
    return rank


def exact_rank_sparse(entries, nrows: int, ncols: int) -> int:
    # lifted subspace stacks eliminate far faster column-wise; rank is transpose-invariant
    M = flint.fmpz_mat(ncols, nrows)
    for r, c, v in entries:
        M[c, r] = v
    return M.rank()


def random_prime(rng: random.Random, floor: int = PRIME_FLOOR) -> int:
    """A prime in [floor, 4*floor) drawn from rng."""
    x = rng.randrange(floor, 4 * floor) | 1
    while not flint.fmpz(x).is_prime():
        x += 2
    return x


def modular_rank_sparse(entries, nrows: int, ncols: int, p: int) -> int:
    """entries: iterable of (row, col, int value)."""
    M = flint.nmod_mat(nrows, ncols, p)
    for r, c, v in entries:
        M[r, c] = v % p
    return M.rank()


def modular_rank(rows: Sequence[Sequence], p: int) -> int:
    rows = integer_rows(rows)
    if not rows:
        return 0
    ncols = len(rows[0])
    flat = [x % p for row in rows for x in row]
    return flint.nmod_mat(len(rows), ncols, flat, p).rank()


FIXED_PRIME = (1 << 61) - 1  # Mersenne prime used for full-rank certificates


def has_full_row_rank(rows: Sequence[Sequence]) -> bool:
    """Certified: rank mod p equal to the row count forces the same over Q."""
    if not rows:
        return True
    return modular_rank(rows, FIXED_PRIME) == len(rows)
