"""Probability transfer on dependency graphs and the gap lower bounds built on it."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .graphs import DependencyGraph, GraphError, as_dependency, induced_subgraph
from .rationals import to_fraction
from .shearer import ShearerError, probability_vector, shearer_check

PRECISION = 50


class TransferError(ValueError):
    pass


def _prob(x, name: str) -> Fraction:
    v = to_fraction(x)
    if not (0 < v <= 1):
        raise TransferError(f"{name} = {v} outside (0,1]")
    return v


def tau(d: int, l: int, p, q) -> Fraction:
    """Uniform transfer amount for maximum degree d and radius l.

    Numerator and denominator may both be negative; only the ratio matters.
    """
    if d < 2 or l < 0:
        raise TransferError(f"need d >= 2 and l >= 0, got d={d}, l={l}")
    p, q = _prob(p, "p"), to_fraction(q)
    if not (0 < q <= p):
        raise TransferError(f"need 0 < q <= p, got q={q}, p={p}")
    a = p ** (l + 1) - p**l * (d - 1) * (1 - p)
    den = a + (1 - p + q) * d * (p**l - (d - 1) ** l * (1 - p) ** l)
    if den == 0:
        raise TransferError(f"tau denominator vanishes at d={d}, l={l}, p={p}, q={q}")
    return q * a / den


@dataclass(frozen=True)
class TransferLayers:
    p: Fraction
    q1: Fraction
    layer_sizes: tuple[int, ...]

    def __post_init__(self):
        if any(not isinstance(t, int) or t < 0 for t in self.layer_sizes):
            raise TransferError(f"layer sizes must be nonnegative integers, got {self.layer_sizes}")
        if self.q1 > self.p:
            raise TransferError(f"q1 = {self.q1} exceeds p = {self.p}")


def transfer_bound(p, q1, layers) -> Fraction:
    """Largest q2 the layer-by-layer transfer guarantees.

    q1 / (1 + sum_k (1 - p + q1) |T_k| (1-p)^(k-1) / p^k)
    """
    p, q1 = to_fraction(p), to_fraction(q1)
    if p == 0:
        raise TransferError("p must be positive")
    sizes = layers.layer_sizes if isinstance(layers, TransferLayers) else tuple(int(t) for t in layers)
    TransferLayers(p, q1, sizes)
    total = Fraction(1)
    for k, size in enumerate(sizes, 1):
        total += (1 - p + q1) * size * (1 - p) ** (k - 1) / p**k
    return q1 / total


def _beyond(g: DependencyGraph, p) -> bool:
    return not shearer_check(g, p).in_bound


def element_transfer(g, p, i: int, j: int, q, check: bool = True) -> tuple[Fraction, ...]:
    """Move q from j to its neighbour i, amplified by (1 - p_i) / p_j."""
    d = as_dependency(g)
    p = probability_vector(p, d.m)
    d.check_vertex(i)
    d.check_vertex(j)
    if i not in d.gamma(j):
        raise TransferError(f"{i} and {j} are not adjacent")
    q = to_fraction(q)
    if not (0 <= q <= p[j - 1]):
        raise TransferError(f"need 0 <= q <= p_{j} = {p[j - 1]}, got {q}")
    if check and not _beyond(d, p):
        raise TransferError("probability vector is inside Shearer's bound")
    out = list(p)
    out[j - 1] -= q
    out[i - 1] += q * (1 - p[i - 1]) / p[j - 1]
    for k, v in enumerate(out, 1):
        if not (0 < v <= 1):
            raise TransferError(f"entry {k} becomes {v}, outside (0,1]")
    return tuple(out)


def transfer_path(g, p, i: int, j: int) -> tuple[int, ...]:
    """Lexicographically least shortest i-j path whose vertices past i share p_j."""
    d = as_dependency(g)
    p = probability_vector(p, d.m)
    target = p[j - 1]
    ok = {v for v in range(1, d.m + 1) if p[v - 1] == target} | {i}
    if i == j:
        raise TransferError("i and j must differ")
    dist_j = d.distances_from(j)
    if i not in dist_j:
        raise TransferError(f"no path between {i} and {j}")
    k = dist_j[i]
    path = [i]
    cur = i
    for step in range(1, k + 1):
        nxt = [v for v in sorted(d.gamma(cur)) if dist_j.get(v) == k - step and v in ok]
        if not nxt:
            raise TransferError(f"no shortest {i}-{j} path has every probability equal to p_{j} = {target}")
        cur = nxt[0]
        path.append(cur)
    return tuple(path)


def path_transfer(g, p, i: int, j: int, q, check: bool = True) -> tuple[Fraction, ...]:
    """Move q from j to a distant i along a shortest path of equal probabilities.

    Each hop is an element transfer whose coefficients are taken at the input
    vector, so intermediates net to zero and i gains
    q ((1-p)/p)^(k-1) (1-p_i)/p.
    """
    d = as_dependency(g)
    p = probability_vector(p, d.m)
    path = transfer_path(d, p, i, j)
    pj = p[j - 1]
    q = to_fraction(q)
    if not (0 <= q <= pj):
        raise TransferError(f"need 0 <= q <= p = {pj}, got {q}")
    if check and not _beyond(d, p):
        raise TransferError("probability vector is inside Shearer's bound")
    out = list(p)
    amount = q
    for a, b in zip(reversed(path[:-1]), reversed(path[1:])):
        step = element_transfer(d, p, a, b, amount, check=False) if amount <= pj else None
        if step is None:
            raise TransferError(f"hop {b}->{a} would move {amount} > p = {pj}")
        for k in range(d.m):
            out[k] += step[k] - p[k]
        amount = amount * (1 - p[a - 1]) / pj
    k = len(path) - 1
    closed = list(p)
    closed[j - 1] -= q
    closed[i - 1] += q * ((1 - pj) / pj) ** (k - 1) * (1 - p[i - 1]) / pj
    assert out == closed, "hop composition disagrees with the closed form"
    for v, x in enumerate(out, 1):
        if not (0 < x <= 1):
            raise TransferError(f"entry {v} becomes {x}, outside (0,1]")
    return tuple(out)


def layer_sizes(g, i: int, l: int, T: Sequence[int] | None = None) -> list[int]:
    """|{j in T : dist(i, j) = k}| for k = 1..l."""
    d = as_dependency(g)
    d.check_vertex(i)
    if l < 0:
        raise TransferError("l must be nonnegative")
    dist = d.distances_from(i)
    ball = {v for v, k in dist.items() if k <= l}
    if T is None:
        T = ball
    else:
        T = set(T)
        if i not in T:
            raise TransferError(f"concentrated set must contain {i}")
        if not T <= ball:
            raise TransferError(f"{sorted(T - ball)} lie farther than {l} from {i}")
        order = sorted(T)
        inner = induced_subgraph(d, order).distances_from(order.index(i) + 1)
        for pos, v in enumerate(order, 1):
            if inner.get(pos) != dist[v]:
                raise TransferError(f"set is not concentrated: no shortest path from {i} to {v} inside it")
    return [sum(1 for v in T if dist[v] == k) for k in range(1, l + 1)]


def generic_gap_bound(delta: int, l: int, P, variant: str = "degree") -> Fraction:
    P = _prob(P, "P")
    if variant == "degree":
        if P == 1 or delta < 2:
            raise TransferError("need P < 1 and delta >= 2")
        return Fraction(1, 25) * P ** (l + 3) / ((1 - P) ** l * (delta - 1) ** l)
    if variant == "radius":
        if P == 1 or l < 1:
            raise TransferError("need P < 1 and l >= 1")
        return Fraction(1, 50) * P**2 * (P / (1 - P)) ** ((l - 1) // 2)
    raise TransferError(f"unknown variant {variant!r}")


def _decimal_fraction(x: Decimal) -> Fraction:
    return Fraction(x)


def triangular_threshold() -> Fraction:
    """(5 sqrt 5 - 11) / 2 to 50 significant digits."""
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return _decimal_fraction((5 * Decimal(5).sqrt() - 11) / 2)


@dataclass(frozen=True)
class GapReport:
    lattice: str
    P_A: Fraction
    q1_rule: str
    layers: tuple[int, ...]
    lower_bound_on_gap: Fraction

    def decimal(self, digits: int = 4) -> str:
        return f"{float(self.lower_bound_on_gap):.{digits - 1}e}"


Q1_RULES = {"p^3": lambda p: p**3, "p^3/2": lambda p: p**3 / 2}

LATTICES = (
    ("square", lambda: Fraction("0.11933888188"), (4, 7, 5, 4)),
    ("hexagonal", lambda: Fraction("0.1547"), (3, 6, 5, 5, 2)),
    ("triangular", triangular_threshold, (6, 7, 5)),
    ("simple cubic", lambda: Fraction("0.0744"), (6, 13, 11, 8)),
)


def lattice_gap_table(q1_rule: str = "p^3/2") -> list[GapReport]:
    if q1_rule not in Q1_RULES:
        raise TransferError(f"q1 rule must be one of {sorted(Q1_RULES)}")
    rows = []
    for name, pa, layers in LATTICES:
        p = pa()
        bound = transfer_bound(p, Q1_RULES[q1_rule](p), layers)
        if bound <= 0:
            raise AssertionError(f"nonpositive gap bound for {name}")
        rows.append(GapReport(name, p, q1_rule, layers, bound))
    return rows
