"""Independence polynomials, Shearer membership, thresholds and the extremal measure."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import prod
from typing import Iterable, Sequence

from .config import DEFAULT_TOL, CapExceeded, limits
from .graphs import BipartiteGraph, DependencyGraph, _bits, as_dependency
from .rationals import to_fraction


class ShearerError(ValueError):
    pass


class BoundaryOutOfRange(ShearerError):
    """Scaling leaves (0,1]^m before the abstract boundary is reached."""


class NegativeMass(ShearerError):
    def __init__(self, subset, mass):
        super().__init__(f"negative mass {mass} on independent set {list(subset)}")
        self.subset = tuple(subset)
        self.mass = mass


def probability_vector(values, m: int, allow_above_one: bool = False) -> tuple[Fraction, ...]:
    vec = tuple(to_fraction(v) for v in values)
    if len(vec) != m:
        raise ShearerError(f"probability vector has {len(vec)} entries, graph has {m} vertices")
    for k, v in enumerate(vec, 1):
        if v <= 0 or (v > 1 and not allow_above_one):
            raise ShearerError(f"entry {k} = {v} outside (0,1]")
    return vec


class IndependencePolynomial:
    """Memoised evaluator of I(G(S), r) for one graph and one weight vector.

    Uses I(S + i) = I(S) - r_i * I(S - Gamma_i) after splitting S into
    connected components.  The memo lives as long as the evaluator.
    """

    def __init__(self, g: DependencyGraph | BipartiteGraph, r: Sequence):
        self.g = as_dependency(g)
        self.r = tuple(to_fraction(x) for x in r)
        if len(self.r) != self.g.m:
            raise ShearerError(f"weight vector has {len(self.r)} entries, graph has {self.g.m} vertices")
        self.adj = self.g.adj_masks
        self.memo: dict[int, Fraction] = {0: Fraction(1)}

    def _component(self, mask: int, start: int) -> int:
        seen = start
        frontier = start
        adj = self.adj
        while frontier:
            nxt = 0
            for b in _bits(frontier):
                nxt |= adj[b]
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        return seen

    def of_mask(self, mask: int) -> Fraction:
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        value = Fraction(1)
        rest = mask
        while rest:
            comp = self._component(rest, rest & -rest)
            rest &= ~comp
            value *= self._connected(comp)
        self.memo[mask] = value
        return value

    def _connected(self, comp: int) -> Fraction:
        hit = self.memo.get(comp)
        if hit is not None:
            return hit
        v = (comp & -comp).bit_length() - 1
        without = comp & ~(1 << v)
        if not without:
            val = 1 - self.r[v]
        else:
            val = self.of_mask(without) - self.r[v] * self.of_mask(without & ~self.adj[v])
        self.memo[comp] = val
        return val

    def __call__(self, S: Iterable[int] | None = None) -> Fraction:
        if S is None:
            return self.of_mask((1 << self.g.m) - 1)
        return self.of_mask(self.g.mask_of(S))


def ind_poly(g, r, S: Iterable[int] | None = None) -> Fraction:
    return IndependencePolynomial(g, r)(S)


def mask_to_set(mask: int) -> tuple[int, ...]:
    return tuple(b + 1 for b in _bits(mask))


@dataclass(frozen=True)
class ShearerVerdict:
    in_bound: bool
    witness: tuple[int, ...] | None
    value_at_witness: Fraction | None
    full_value: Fraction

    @property
    def value(self) -> Fraction:
        return self.full_value if self.in_bound else self.value_at_witness


def _check_cap(m: int, cap: int | None):
    cap = limits().max_vertices if cap is None else cap
    if m > cap:
        raise CapExceeded(f"{m} vertices exceeds the enumeration cap {cap}")


def connected_subsets_by_size(g: DependencyGraph):
    """Yield (size, sorted list of masks) for connected induced subsets, size 1, 2, ..."""
    adj = g.adj_masks
    level = {1 << v for v in range(g.m)}
    size = 1
    while level:
        yield size, sorted(level, key=mask_to_set)
        nxt = set()
        for mask in level:
            border = 0
            for b in _bits(mask):
                border |= adj[b]
            border &= ~mask
            for b in _bits(border):
                nxt.add(mask | (1 << b))
        level = nxt
        size += 1


def shearer_check(g, r, cap: int | None = None) -> ShearerVerdict:
    """Smallest, then lexicographically least, vertex set with I <= 0 if any."""
    d = as_dependency(g)
    _check_cap(d.m, cap)
    poly = IndependencePolynomial(d, probability_vector(r, d.m))
    for _, masks in connected_subsets_by_size(d):
        for mask in masks:
            val = poly.of_mask(mask)
            if val <= 0:
                return ShearerVerdict(False, mask_to_set(mask), val, poly())
    return ShearerVerdict(True, None, None, poly())


def in_bound(g, r, cap: int | None = None) -> bool:
    return shearer_check(g, r, cap).in_bound


def _bisect(pred_beyond, lo: Fraction, hi: Fraction, tol: Fraction) -> Fraction:
    """pred_beyond(lo) is False and pred_beyond(hi) True; shrink to width tol, return hi."""
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if pred_beyond(mid):
            hi = mid
        else:
            lo = mid
    return hi


def symmetric_threshold(g, tol=DEFAULT_TOL, cap: int | None = None) -> Fraction:
    d = as_dependency(g)
    if d.m == 0:
        raise ShearerError("threshold of an empty graph is undefined")
    _check_cap(d.m, cap)
    tol = to_fraction(tol)
    if tol <= 0:
        raise ShearerError("tol must be positive")
    return _bisect(lambda p: not shearer_check(d, [p] * d.m, cap).in_bound, Fraction(0), Fraction(1), tol)


def boundary_scale(g, r, tol=DEFAULT_TOL, cap: int | None = None) -> Fraction:
    """lambda with lambda * r on the abstract boundary, to within tol."""
    d = as_dependency(g)
    r = probability_vector(r, d.m)
    _check_cap(d.m, cap)
    tol = to_fraction(tol)
    if tol <= 0:
        raise ShearerError("tol must be positive")
    hi = 1 / max(r)

    def beyond(lam):
        return not shearer_check(d, [lam * x for x in r], cap).in_bound

    if not beyond(hi):
        raise BoundaryOutOfRange(f"lambda = {hi} already puts an entry at 1 while still in bound")
    return _bisect(beyond, Fraction(0), hi, tol)


def shearer_floor(g, p, t: int, on_boundary: bool, cap: int | None = None):
    """(F, [I(g,p,1), ..., I(g,p,t)]) with I(g,p,k) the minimum over all k-subsets."""
    d = as_dependency(g)
    p = probability_vector(p, d.m)
    if not (0 <= t <= d.m - 2):
        raise ShearerError(f"t = {t} outside 0..{d.m - 2}")
    _check_cap(d.m, cap)
    poly = IndependencePolynomial(d, p)
    mins = []
    for k in range(1, t + 1):
        mins.append(min(poly.of_mask(sum(1 << v for v in c)) for c in combinations(range(d.m), k)))
    if not on_boundary:
        return poly(), mins
    F = min(p) ** t
    for k, val in enumerate(mins, 1):
        F *= val / (d.m - 1 - k)
    return F, mins


def independent_sets(g) -> list[int]:
    """All independent sets as masks, in (size, lexicographic) order."""
    d = as_dependency(g)
    adj = d.adj_masks
    out = [0]
    frontier = [0]
    while frontier:
        nxt = []
        for mask in frontier:
            top = mask.bit_length()
            blocked = 0
            for b in _bits(mask):
                blocked |= adj[b]
            for v in range(top, d.m):
                if not (blocked >> v) & 1:
                    nxt.append(mask | (1 << v))
        out.extend(nxt)
        frontier = nxt
    out.sort(key=lambda s: (bin(s).count("1"), mask_to_set(s)))
    return out


def extremal_distribution(g, p, cap: int | None = None) -> dict[tuple[int, ...], Fraction]:
    """mu(S) = prod_{i in S} p_i * I(G(V - Gamma^+(S))) over independent sets S.

    Raises NegativeMass on the first independent set with negative mass.
    """
    d = as_dependency(g)
    p = probability_vector(p, d.m)
    _check_cap(d.m, cap)
    poly = IndependencePolynomial(d, p)
    full = (1 << d.m) - 1
    adj = d.adj_masks
    out = {}
    for mask in independent_sets(d):
        closed = mask
        for b in _bits(mask):
            closed |= adj[b]
        mass = prod((p[b] for b in _bits(mask)), start=Fraction(1)) * poly.of_mask(full & ~closed)
        if mass < 0:
            raise NegativeMass(mask_to_set(mask), mass)
        out[mask_to_set(mask)] = mass
    return out
