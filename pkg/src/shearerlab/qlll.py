"""Explicit subspace instances at and beyond Shearer's bound, with rank checks.

A left vertex i owns a local subspace of the tensor product of the qudits it
acts on.  Local basis columns enumerate that product in mixed radix over the
sorted qudit list, first qudit most significant; the global space uses the same
convention over qudits 1..n.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, lcm, log2, prod

from .config import CapExceeded, Limits, limits
from .graphs import BipartiteGraph, base_graph, induced_subgraph
from .linalg import exact_rank_sparse, has_full_row_rank, modular_rank_sparse, random_prime
from .rationals import fmt, to_fraction
from .shearer import IndependencePolynomial, ShearerError, probability_vector, shearer_check


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class LocalSubspace:
    acts_on: tuple[int, ...]
    basis: tuple[tuple, ...]      # rows of ints or Fractions


@dataclass(frozen=True)
class SubspaceInstance:
    graph: BipartiteGraph
    dims: tuple[int, ...]
    hamiltonians: tuple[LocalSubspace, ...]
    seed: int

    def __post_init__(self):
        if len(self.dims) != self.graph.n:
            raise ConstructionError(f"{len(self.dims)} dims for {self.graph.n} qudits")
        if any(int(d) < 1 for d in self.dims):
            raise ConstructionError("qudit dimensions must be positive")
        if len(self.hamiltonians) != self.graph.m:
            raise ConstructionError(f"{len(self.hamiltonians)} subspaces for {self.graph.m} left vertices")
        for i, h in enumerate(self.hamiltonians, 1):
            if tuple(sorted(self.graph.left_nbrs[i])) != h.acts_on:
                raise ConstructionError(f"subspace {i} acts on {h.acts_on}, graph says {sorted(self.graph.left_nbrs[i])}")
            width = self.local_dim(i)
            if any(len(row) != width for row in h.basis):
                raise ConstructionError(f"subspace {i} rows must have {width} entries")

    def local_dim(self, i: int) -> int:
        return prod(self.dims[j - 1] for j in self.hamiltonians[i - 1].acts_on)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    def relative_dims(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(len(h.basis), self.local_dim(i)) for i, h in enumerate(self.hamiltonians, 1))

    def check_full_rank(self) -> bool:
        return all(has_full_row_rank(h.basis) for h in self.hamiltonians)

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "dims": list(self.dims),
            "seed": self.seed,
            "hamiltonians": [
                {"acts_on": list(h.acts_on), "basis": [[fmt(Fraction(x)) for x in row] for row in h.basis]}
                for h in self.hamiltonians
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SubspaceInstance":
        try:
            g = BipartiteGraph.from_json(obj["graph"])
            hams = []
            for h in obj["hamiltonians"]:
                rows = []
                for row in h["basis"]:
                    vals = [to_fraction(x) for x in row]
                    rows.append(tuple(int(v) if v.denominator == 1 else v for v in vals))
                hams.append(LocalSubspace(tuple(int(j) for j in h["acts_on"]), tuple(rows)))
            return cls(g, tuple(int(d) for d in obj["dims"]), tuple(hams), int(obj.get("seed", 0)))
        except (KeyError, TypeError) as exc:
            raise ConstructionError(f"malformed instance JSON: {exc}") from exc


# ----------------------------------------------------------- sampling

def _sample(rng: random.Random, rows: int, cols: int, lim: Limits) -> list[list[int]]:
    b = lim.entry_bound
    for _ in range(lim.resample_attempts):
        M = [[rng.randint(-b, b) for _ in range(cols)] for _ in range(rows)]
        if has_full_row_rank(M):
            return M
    raise ConstructionError(f"no full-rank {rows}x{cols} sample after {lim.resample_attempts} attempts")


def sample_random_subspace(ambient_dim: int, sub_dim: int, seed: int | random.Random, lim: Limits | None = None):
    """sub_dim x ambient_dim integer basis of a generic subspace."""
    if not (0 <= sub_dim <= ambient_dim):
        raise ConstructionError(f"need 0 <= sub_dim <= ambient_dim, got {sub_dim}, {ambient_dim}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return _sample(rng, sub_dim, ambient_dim, lim or limits())


# ------------------------------------------------------ dimension plan

@dataclass
class SplitLevel:
    """How one minimal witness is handled: a rank-one vertex or a qudit split."""

    witness: tuple[int, ...]
    qudit: int | None = None
    targets: tuple[int, ...] = ()
    fractions: dict = field(default_factory=dict)   # slice share f_l of the split qudit
    overflow: frozenset = frozenset()
    weight_sum: Fraction = Fraction(0)


@dataclass
class Plan:
    dims: tuple[int, ...]
    top: SplitLevel
    weight_sums: list = field(default_factory=list)   # every split level visited


def _witness(g: BipartiteGraph, L: tuple[int, ...], rr: dict) -> tuple[int, ...] | None:
    sub = induced_subgraph(base_graph(g), L)
    verdict = shearer_check(sub, [rr[i] for i in L])
    if verdict.in_bound:
        return None
    return tuple(L[k - 1] for k in verdict.witness)


def _required_dims(g, L, rr, path, lim, sums) -> tuple[dict, SplitLevel]:
    S = _witness(g, L, rr)
    if S is None:
        raise ConstructionError(f"subsystem {list(L)} is in bound (path {path})")
    dims: dict[int, int] = {}
    if len(S) == 1:
        level = SplitLevel(S)
    else:
        d = base_graph(g)
        if not d.is_connected_mask(d.mask_of(S)):
            raise AssertionError(f"minimal witness {S} is disconnected")
        Sset = set(S)
        n = min(j for j in range(1, g.n + 1) if len(g.right_nbrs[j] & Sset) >= 2)
        T = tuple(sorted(g.right_nbrs[n] & Sset))
        vec = [rr.get(i, Fraction(0)) for i in range(1, g.m + 1)]
        poly = IndependencePolynomial(d, vec)
        rest = {l: poly(Sset - d.gamma_plus(l)) for l in T}
        weights = {l: rr[l] * rest[l] for l in T}
        W = sum(weights.values())
        sums.append(W)
        frac = {l: weights[l] / W for l in T}
        base = lcm(*(f.denominator for f in frac.values()))
        slices = {l: int(frac[l] * base) for l in T}
        overflow = set()
        K = 1
        others = tuple(sorted(Sset - set(T)))
        for l in T:
            ratio = W / rest[l]
            if ratio > 1:
                overflow.add(l)
                continue
            sub_rr = {i: rr[i] for i in others}
            sub_rr[l] = ratio
            e, _ = _required_dims(g, tuple(sorted(others + (l,))), sub_rr, path + [(n, l)], lim, sums)
            for j, v in e.items():
                if j != n:
                    dims[j] = lcm(dims.get(j, 1), v)
            en = e.get(n, 1)
            K = lcm(K, en // gcd(en, slices[l]))
        dims[n] = base * K
        level = SplitLevel(S, n, T, frac, frozenset(overflow), W)
    for i in L:
        nb = sorted(g.left_nbrs[i])
        x = rr[i] * prod(dims.get(j, 1) for j in nb)
        if x.denominator != 1:
            if not nb:
                raise ConstructionError(f"left vertex {i} acts on no qudit but has relative dimension {rr[i]}")
            dims[nb[0]] = dims.get(nb[0], 1) * x.denominator
    total = prod(dims.values())
    if total > lim.max_total_dim:
        raise CapExceeded(f"total dimension {total} exceeds {lim.max_total_dim} along path {path}")
    return dims, level


def spanning_plan(g: BipartiteGraph, r, lim: Limits | None = None) -> Plan:
    lim = lim or limits()
    r = probability_vector(r, g.m)
    rr = {i: r[i - 1] for i in range(1, g.m + 1)}
    sums: list = []
    dims, top = _required_dims(g, tuple(range(1, g.m + 1)), rr, [], lim, sums)
    return Plan(tuple(dims.get(j, 1) for j in range(1, g.n + 1)), top, sums)


# ------------------------------------------------------------ building

def _local_layout(acts_on, dims):
    """Digits of every local index, in local column order."""
    return list(product(*(range(dims[j - 1]) for j in acts_on)))


def _build(g: BipartiteGraph, r, plan: Plan, rng: random.Random, lim: Limits) -> SubspaceInstance:
    dims = plan.dims
    top = plan.top
    offsets = {}
    if top.qudit is not None:
        dn = dims[top.qudit - 1]
        start = 0
        for l in top.targets:
            size = int(top.fractions[l] * dn)
            offsets[l] = (start, start + size)
            start += size
        assert start == dn
    hams = []
    for i in range(1, g.m + 1):
        acts = tuple(sorted(g.left_nbrs[i]))
        width = prod(dims[j - 1] for j in acts)
        rows = r[i - 1] * width
        if rows.denominator != 1:
            raise AssertionError(f"relative dimension of {i} not representable")
        rows = int(rows)
        if top.qudit is None and i in top.witness:
            basis = [[int(a == b) for b in range(width)] for a in range(width)]
        elif i in top.targets:
            pos = acts.index(top.qudit)
            lo, hi = offsets[i]
            layout = _local_layout(acts, dims)
            inside = [c for c, digs in enumerate(layout) if lo <= digs[pos] < hi]
            outside = [c for c, digs in enumerate(layout) if not lo <= digs[pos] < hi]
            if i in top.overflow:
                basis = [[0] * width for _ in inside]
                for row, c in zip(basis, inside):
                    row[c] = 1
                extra = _sample(rng, rows - len(inside), len(outside), lim)
                for vals in extra:
                    row = [0] * width
                    for c, v in zip(outside, vals):
                        row[c] = v
                    basis.append(row)
            else:
                basis = []
                for vals in _sample(rng, rows, len(inside), lim):
                    row = [0] * width
                    for c, v in zip(inside, vals):
                        row[c] = v
                    basis.append(row)
        else:
            basis = _sample(rng, rows, width, lim)
        hams.append(LocalSubspace(acts, tuple(tuple(row) for row in basis)))
    return SubspaceInstance(g, dims, tuple(hams), 0)


def _rng_for(seed: int, attempt: int) -> random.Random:
    return random.Random(seed + (attempt << 64))


def _divisors(x: int) -> list[int]:
    return [k for k in range(1, x + 1) if x % k == 0]


def _integral(g: BipartiteGraph, r, dims) -> bool:
    return all((r[i - 1] * prod(dims[j - 1] for j in g.left_nbrs[i])).denominator == 1 for i in range(1, g.m + 1))


def _generic(g, r, dims, rng, lim) -> SubspaceInstance:
    hams = []
    for i in range(1, g.m + 1):
        acts = tuple(sorted(g.left_nbrs[i]))
        width = prod(dims[j - 1] for j in acts)
        hams.append(LocalSubspace(acts, tuple(map(tuple, _sample(rng, int(r[i - 1] * width), width, lim)))))
    return SubspaceInstance(g, tuple(dims), tuple(hams), 0)


def _spans_mod_p(inst: SubspaceInstance) -> bool:
    from .linalg import FIXED_PRIME

    total = inst.total_dim
    nrows = lifted_row_count(inst)
    if nrows < total:
        return False
    return modular_rank_sparse(lifted_entries(inst), nrows, total, FIXED_PRIME) == total


def _smallest_generic(g, r, plan_dims, seed, lim, budget: int = 64):
    """Generic subspaces on the smallest divisor of the plan dims that spans.

    Generic sampling reaches the largest span any choice of subspaces with
    these dimensions can reach, so the plan dims always qualify; smaller ones
    often do too.  Each candidate is certified by a rank check mod a prime.
    """
    total = prod(plan_dims)
    cands = [d for d in product(*(_divisors(x) for x in plan_dims)) if _integral(g, r, d)]
    cands.sort(key=lambda d: (prod(d), d))
    rng = _rng_for(seed, 0)
    for dims in cands[:budget]:
        if prod(dims) >= total:
            break
        rows = sum(r[i - 1] * prod(dims) for i in range(1, g.m + 1))
        if rows < prod(dims):
            continue
        if rows * prod(dims) > lim.max_rank_entries:
            break
        inst = _generic(g, r, dims, rng, lim)
        if _spans_mod_p(inst):
            return SubspaceInstance(g, inst.dims, inst.hamiltonians, seed)
    return None


def construct_spanning_instance(g: BipartiteGraph, r, seed: int, lim: Limits | None = None,
                                minimize: bool = True) -> SubspaceInstance:
    """Instance with relative dimensions r whose subspaces span everything.

    Needs r beyond Shearer's bound for the base graph.  The recursive slice
    plan fixes dimensions that provably suffice; with minimize, smaller
    divisors of those are tried first with generic subspaces.  A failed
    verification of the sliced build triggers a single reseed.
    """
    lim = lim or limits()
    r = probability_vector(r, g.m)
    if shearer_check(base_graph(g), r).in_bound:
        raise ConstructionError("r is in Shearer's bound; use the boundary construction")
    plan = spanning_plan(g, r, lim)
    if minimize:
        small = _smallest_generic(g, r, plan.dims, seed, lim)
        if small is not None:
            return small
    for attempt in range(2):
        inst = _build(g, r, plan, _rng_for(seed, attempt), lim)
        inst = SubspaceInstance(g, inst.dims, inst.hamiltonians, seed)
        report = verify_span(inst, lim=lim)
        if report.span_dim == report.total_dim:
            return inst
    raise ConstructionError("sampled subspaces failed to span after one reseed")


def construct_boundary_instance(g: BipartiteGraph, r, seed: int, lim: Limits | None = None,
                                minimize: bool = True) -> SubspaceInstance:
    """Instance whose kernel has relative dimension exactly I(G_D, r)."""
    lim = lim or limits()
    r = probability_vector(r, g.m)
    verdict = shearer_check(base_graph(g), r)
    if not verdict.in_bound:
        raise ConstructionError(f"r is beyond Shearer's bound (witness {list(verdict.witness)})")
    extra = max(verdict.full_value, Fraction(0))
    if g.n == 0:
        raise ConstructionError("no qudits to host the complementary subspace")
    edges = set(g.edges) | {(g.m + 1, j) for j in range(1, g.n + 1)}
    bigger = BipartiteGraph(g.m + 1, g.n, frozenset(edges))
    inst = construct_spanning_instance(bigger, list(r) + [extra], seed, lim, minimize)
    return SubspaceInstance(g, inst.dims, inst.hamiltonians[:-1], seed)


# -------------------------------------------------------- verification

@dataclass(frozen=True)
class SpanReport:
    total_dim: int
    span_dim: int
    kernel_relative_dim: Fraction
    method: str                # exact | modular
    primes: tuple = ()
    certified: bool = True     # rank is exact, not only a lower bound


def _strides(dims) -> list[int]:
    out = [1] * len(dims)
    for k in range(len(dims) - 2, -1, -1):
        out[k] = out[k + 1] * dims[k + 1]
    return out


def lifted_entries(inst: SubspaceInstance):
    """Yield (row, col, value) of every subspace lifted to the full space.

    Integer-valued rows only; rational rows are scaled by their denominators.
    """
    from .linalg import integer_rows

    dims = inst.dims
    stride = _strides(dims)
    row = 0
    for h in inst.hamiltonians:
        acts = h.acts_on
        rest = [j for j in range(1, len(dims) + 1) if j not in acts]
        local_off = [sum(d * stride[j - 1] for d, j in zip(digs, acts)) for digs in _local_layout(acts, dims)]
        rest_off = [sum(d * stride[j - 1] for d, j in zip(digs, rest)) for digs in _local_layout(rest, dims)]
        nz_rows = [[(local_off[c], v) for c, v in enumerate(vec) if v] for vec in integer_rows(h.basis)]
        for nz in nz_rows:
            for ro in rest_off:
                for off, v in nz:
                    yield row, off + ro, v
                row += 1


def lifted_row_count(inst: SubspaceInstance) -> int:
    total = inst.total_dim
    return sum(len(h.basis) * total // inst.local_dim(i) for i, h in enumerate(inst.hamiltonians, 1))


def verify_span(inst: SubspaceInstance, mode: str | None = None, lim: Limits | None = None) -> SpanReport:
    """Rank of the sum of all lifted subspaces; exact for small spaces, modular above."""
    lim = lim or limits()
    total = inst.total_dim
    nrows = lifted_row_count(inst)
    if mode is None:
        mode = "exact" if total <= lim.exact_rank_cap else "modular"
    if mode == "exact":
        if total > lim.exact_mode_cap:
            raise CapExceeded(f"exact rank limited to {lim.exact_mode_cap} columns, instance has {total}")
        rank = exact_rank_sparse(lifted_entries(inst), nrows, total) if nrows else 0
        return SpanReport(total, rank, 1 - Fraction(rank, total), "exact")
    if mode != "modular":
        raise ValueError(f"unknown rank mode {mode!r}")
    if nrows * total > lim.max_rank_entries:
        raise CapExceeded(
            f"modular rank of a {nrows} x {total} stack exceeds {lim.max_rank_entries} dense entries"
        )
    rng = random.Random(inst.seed ^ 0x5EED)
    primes, ranks = [], []
    while len(primes) < max(2, lim.modular_primes):
        p = random_prime(rng)
        if p in primes:
            continue
        primes.append(p)
        ranks.append(modular_rank_sparse(lifted_entries(inst), nrows, total, p) if nrows else 0)
    if len(set(ranks)) > 1:
        return verify_span(inst, "exact", lim)
    rank = ranks[0]
    # rank mod p never exceeds the rational rank, so hitting an upper bound is a proof
    certified = rank == total or rank == nrows
    return SpanReport(total, rank, 1 - Fraction(rank, total), "modular", tuple(primes), certified)


# ------------------------------------------------------------ padding

def pad_dims(inst: SubspaceInstance, new_dims, lim: Limits | None = None) -> SubspaceInstance:
    """Replace each qudit by new/old orthogonal copies of itself."""
    lim = lim or limits()
    new_dims = tuple(int(x) for x in new_dims)
    if len(new_dims) != len(inst.dims):
        raise ConstructionError("dimension vector length mismatch")
    for j, (a, b) in enumerate(zip(inst.dims, new_dims), 1):
        if b < 1 or b % a:
            raise ConstructionError(f"qudit {j}: {b} is not a positive multiple of {a}")
    if prod(new_dims) > lim.max_total_dim:
        raise CapExceeded(f"padded total dimension {prod(new_dims)} exceeds {lim.max_total_dim}")
    hams = []
    for h in inst.hamiltonians:
        acts = h.acts_on
        old_layout = _local_layout(acts, inst.dims)
        copies = list(product(*(range(new_dims[j - 1] // inst.dims[j - 1]) for j in acts)))
        width = prod(new_dims[j - 1] for j in acts)
        nd = [new_dims[j - 1] for j in acts]

        def index(digs):
            k = 0
            for x, d in zip(digs, nd):
                k = k * d + x
            return k

        rows = []
        for vec in h.basis:
            for cp in copies:
                row = [0] * width
                for col, digs in enumerate(old_layout):
                    if vec[col]:
                        shifted = [c * inst.dims[j - 1] + x for c, x, j in zip(cp, digs, acts)]
                        row[index(shifted)] = vec[col]
                rows.append(tuple(row))
        hams.append(LocalSubspace(acts, tuple(rows)))
    return SubspaceInstance(inst.graph, new_dims, tuple(hams), inst.seed)


def dimension_audit(dims, r, m: int) -> bool:
    """Every qudit dimension within prod pd(r_i)^(2^(2m))."""
    budget = sum(log2(to_fraction(x).denominator) for x in r) * (4 ** m)
    return all(log2(d) <= budget + 1e-9 for d in dims)
