"""Finite event systems over independent discrete variables, by brute force.

Variables and events are 1-indexed.  A variable takes values 0..domain-1 and an
event is the set of assignments to its declared variables on which it holds.
For binary variables x^1 = 0 and x^2 = 1, so "up" means the 1-section contains
the 0-section.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import lcm, prod

from .config import CapExceeded, limits
from .graphs import BipartiteGraph, DependencyGraph, _bits, as_dependency
from .rationals import fmt, to_fraction


class EventError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    domain: int
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if self.domain < 1 or len(self.masses) != self.domain:
            raise EventError(f"variable needs {self.domain} masses, got {len(self.masses)}")
        if any(x < 0 for x in self.masses) or sum(self.masses) != 1:
            raise EventError(f"masses {list(map(str, self.masses))} must be nonnegative and sum to 1")

    @classmethod
    def uniform(cls, domain: int = 2) -> "Variable":
        return cls(domain, (Fraction(1, domain),) * domain)


@dataclass(frozen=True)
class Event:
    vbl: tuple[int, ...]
    holds: frozenset    # tuples of values over vbl

    @classmethod
    def of(cls, vbl, holds) -> "Event":
        order = sorted(range(len(vbl)), key=lambda k: vbl[k])
        vbl = tuple(vbl[k] for k in order)
        if len(set(vbl)) != len(vbl):
            raise EventError(f"repeated variable in {vbl}")
        return cls(vbl, frozenset(tuple(a[k] for k in order) for a in holds))


@dataclass(frozen=True)
class DiscreteEventSystem:
    variables: tuple[Variable, ...]
    events: tuple[Event, ...]

    def __post_init__(self):
        n = len(self.variables)
        size = prod(v.domain for v in self.variables)
        if size > limits().max_points:
            raise CapExceeded(f"sample space of {size} points exceeds {limits().max_points}")
        for idx, e in enumerate(self.events, 1):
            for x in e.vbl:
                if not 1 <= x <= n:
                    raise EventError(f"event {idx} uses unknown variable {x}")
            for a in e.holds:
                if len(a) != len(e.vbl) or any(not 0 <= v < self.variables[x - 1].domain for v, x in zip(a, e.vbl)):
                    raise EventError(f"event {idx} has an invalid assignment {a}")

    @property
    def m(self) -> int:
        return len(self.events)

    @property
    def n(self) -> int:
        return len(self.variables)

    def graph(self) -> BipartiteGraph:
        return BipartiteGraph.from_edges(self.m, self.n, [(i, x) for i, e in enumerate(self.events, 1) for x in e.vbl])

    def degree(self, x: int) -> int:
        return sum(1 for e in self.events if x in e.vbl)

    # -- enumeration over the product space, first variable most significant

    def _space(self):
        cached = self.__dict__.get("_space_cache")
        if cached is None:
            doms = [v.domain for v in self.variables]
            stride = [1] * len(doms)
            for k in range(len(doms) - 2, -1, -1):
                stride[k] = stride[k + 1] * doms[k + 1]
            den = lcm(*(x.denominator for v in self.variables for x in v.masses)) if self.variables else 1
            per_var = [[int(x * den) for x in v.masses] for v in self.variables]
            weights = [prod(per_var[k][a] for k, a in enumerate(pt)) for pt in product(*(range(d) for d in doms))]
            cached = (doms, stride, weights, den ** len(doms))
            object.__setattr__(self, "_space_cache", cached)
        return cached

    def mask(self, i: int) -> int:
        """Bitmask over sample points where event i holds."""
        if not 1 <= i <= self.m:
            raise EventError(f"event {i} outside 1..{self.m}")
        memo = self.__dict__.setdefault("_mask_cache", {})
        if i not in memo:
            memo[i] = self._event_mask(self.events[i - 1])
        return memo[i]

    def _event_mask(self, e: Event) -> int:
        doms, stride, _, _ = self._space()
        rest = [k for k in range(self.n) if k + 1 not in e.vbl]
        rest_offsets = [sum(a * stride[k] for a, k in zip(pt, rest)) for pt in product(*(range(doms[k]) for k in rest))]
        out = 0
        for a in e.holds:
            base = sum(v * stride[x - 1] for v, x in zip(a, e.vbl))
            for off in rest_offsets:
                out |= 1 << (base + off)
        return out

    def full_mask(self) -> int:
        return (1 << len(self._space()[2])) - 1

    def measure(self, mask: int) -> Fraction:
        _, _, w, den = self._space()
        return Fraction(sum(w[b] for b in _bits(mask)), den)

    def to_json(self) -> dict:
        return {
            "variables": [{"domain": v.domain, "masses": [fmt(x) for x in v.masses]} for v in self.variables],
            "events": [{"vbl": list(e.vbl), "assignments": sorted(list(a) for a in e.holds)} for e in self.events],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteEventSystem":
        try:
            vs = tuple(Variable(int(v["domain"]), tuple(to_fraction(x) for x in v["masses"])) for v in obj["variables"])
            es = tuple(Event.of(tuple(int(x) for x in e["vbl"]), [tuple(int(a) for a in t) for t in e["assignments"]])
                       for e in obj["events"])
        except (KeyError, TypeError) as exc:
            raise EventError(f"malformed event system JSON: {exc}") from exc
        return cls(vs, es)


# ----------------------------------------------------------------- probability

def _eval(sys: DiscreteEventSystem, expr) -> int:
    """Expressions: event index, or ("not"|"and"|"or"|"minus", ...)."""
    if isinstance(expr, int) and not isinstance(expr, bool):
        return sys.mask(expr)
    if isinstance(expr, (tuple, list)) and expr:
        op, *args = expr
        masks = [_eval(sys, a) for a in args]
        if op == "not" and len(masks) == 1:
            return sys.full_mask() & ~masks[0]
        if op == "or":
            out = 0
            for x in masks:
                out |= x
            return out
        if op == "and":
            out = sys.full_mask()
            for x in masks:
                out &= x
            return out
        if op == "minus" and len(masks) == 2:
            return masks[0] & ~masks[1]
    raise EventError(f"cannot read event expression {expr!r}")


def event_prob(sys: DiscreteEventSystem, expr, given=None) -> Fraction:
    mask = _eval(sys, expr)
    if given is None:
        return sys.measure(mask)
    cond = _eval(sys, given)
    denom = sys.measure(cond)
    if denom == 0:
        raise EventError("conditioning event has probability zero")
    return sys.measure(mask & cond) / denom


# ------------------------------------------------------------- monotonicity

def sections(sys: DiscreteEventSystem, i: int, x: int) -> tuple[frozenset, frozenset]:
    """Cross sections of event i at x = 0 and x = 1 over its other declared variables."""
    e = sys.events[i - 1]
    if sys.variables[x - 1].domain != 2:
        raise EventError(f"variable {x} is not binary")
    if x not in e.vbl:
        return e.holds, e.holds
    k = e.vbl.index(x)
    lo = frozenset(a[:k] + a[k + 1:] for a in e.holds if a[k] == 0)
    hi = frozenset(a[:k] + a[k + 1:] for a in e.holds if a[k] == 1)
    return lo, hi


def _direction(lo, hi) -> str:
    if lo == hi:
        return "both"
    if lo <= hi:
        return "up"
    if hi <= lo:
        return "down"
    return "neither"


def cross_section_monotone(sys: DiscreteEventSystem, i: int, x: int):
    """(up | down | both | neither, section at 0, section at 1)."""
    lo, hi = sections(sys, i, x)
    return _direction(lo, hi), lo, hi


DIRECTIONS = {"up": {"up"}, "down": {"down"}, "both": {"up", "down"}, "neither": set()}
FLIP = {"up": "down", "down": "up"}


def opposite(a: str, b: str) -> bool:
    return any(FLIP[d] in DIRECTIONS[b] for d in DIRECTIONS[a])


def aligned(a: str, b: str) -> bool:
    return bool(DIRECTIONS[a] & DIRECTIONS[b])


def standard_violation(sys: DiscreteEventSystem):
    """None for a standard system, else (variable, reason)."""
    for x in range(1, sys.n + 1):
        users = [i for i, e in enumerate(sys.events, 1) if x in e.vbl]
        if len(users) > 2 and sys.variables[x - 1].domain > len(users):
            return x, f"takes {sys.variables[x - 1].domain} values but has degree {len(users)}"
        if len(users) != 2:
            continue
        if sys.variables[x - 1].domain != 2:
            return x, "degree-2 variable is not binary"
        a, b = (cross_section_monotone(sys, i, x)[0] for i in users)
        if not opposite(a, b):
            return x, f"events {users} are {a}/{b}, not monotone in opposite directions"
    return None


# ------------------------------------------------------------------ cutting

@dataclass(frozen=True)
class CuttingPlan:
    cuts: tuple[tuple[int, int], ...]


def two_discrete(sys: DiscreteEventSystem, i: int) -> bool:
    return all(sys.degree(x) <= 2 for x in sys.events[i - 1].vbl)


def validate_plan(sys: DiscreteEventSystem, plan) -> CuttingPlan:
    cuts = tuple((int(k), int(i)) for k, i in (plan.cuts if isinstance(plan, CuttingPlan) else plan))
    for k, i in cuts:
        for v in (k, i):
            if not 1 <= v <= sys.m:
                raise EventError(f"cut ({k},{i}) names unknown event {v}")
        if k == i:
            raise EventError(f"cut ({k},{i}) cuts an event by itself")
        if not two_discrete(sys, i):
            raise EventError(f"cut ({k},{i}): event {i} is not 2-discrete")
        if not set(sys.events[k - 1].vbl) & set(sys.events[i - 1].vbl):
            raise EventError(f"cut ({k},{i}): events share no variable")
    for a, b in combinations(cuts, 2):
        if set(sys.events[a[1] - 1].vbl) & set(sys.events[b[1] - 1].vbl):
            raise EventError(f"cuts {a} and {b} are incompatible: their cut-by events share a variable")
    return CuttingPlan(cuts)


def cut_events(sys: DiscreteEventSystem, plan) -> DiscreteEventSystem:
    """A_k' = A_k minus every A_i with (k, i) in the plan, applied in parallel."""
    plan = validate_plan(sys, plan)
    by_k: dict[int, list[int]] = {}
    for k, i in plan.cuts:
        by_k.setdefault(k, []).append(i)
    events = list(sys.events)
    for k, cutters in by_k.items():
        ek = sys.events[k - 1]
        vbl = tuple(sorted(set(ek.vbl).union(*(sys.events[i - 1].vbl for i in cutters))))
        pos = {x: t for t, x in enumerate(vbl)}

        def holds(e: Event, a) -> bool:
            return tuple(a[pos[x]] for x in e.vbl) in e.holds

        keep = [a for a in product(*(range(sys.variables[x - 1].domain) for x in vbl))
                if holds(ek, a) and not any(holds(sys.events[i - 1], a) for i in cutters)]
        events[k - 1] = Event(vbl, frozenset(keep))
    return DiscreteEventSystem(sys.variables, tuple(events))


# --------------------------------------------------------- lopsidependency

@dataclass(frozen=True)
class LopsidependencyVerdict:
    ok: bool
    counterexample: tuple | None = None   # (i, K)

    def __bool__(self):
        return self.ok


def lopsidependency_check(sys: DiscreteEventSystem, g, max_events: int = 16) -> LopsidependencyVerdict:
    """Pr(A_i | union of A_k, k in K) >= Pr(A_i) for all nonempty K outside Gamma_i^+."""
    d = as_dependency(g)
    if d.m != sys.m:
        raise EventError(f"graph has {d.m} vertices, system has {sys.m} events")
    if sys.m > max_events:
        raise CapExceeded(f"{sys.m} events exceeds the subset enumeration cap {max_events}")
    masks = [sys.mask(i) for i in range(1, sys.m + 1)]
    for i in range(1, sys.m + 1):
        pi = sys.measure(masks[i - 1])
        far = [k for k in range(1, sys.m + 1) if k not in d.gamma_plus(i)]
        for size in range(1, len(far) + 1):
            for K in combinations(far, size):
                u = 0
                for k in K:
                    u |= masks[k - 1]
                pu = sys.measure(u)
                if pu and sys.measure(u & masks[i - 1]) < pi * pu:
                    return LopsidependencyVerdict(False, (i, K))
    return LopsidependencyVerdict(True)


# ------------------------------------------------------ cutting properties

@dataclass(frozen=True)
class CuttingReport:
    union_preserved: bool
    lopsidependency: LopsidependencyVerdict
    aligned_pairs_checked: int
    correlation_failures: tuple          # event pairs of the cut system
    disjoint_unions_checked: int
    union_correlation_failures: tuple    # (K1, K2)

    @property
    def ok(self) -> bool:
        return (self.union_preserved and self.lopsidependency.ok
                and not self.correlation_failures and not self.union_correlation_failures)


def _all_aligned(sys: DiscreteEventSystem, a: int, b: int) -> bool:
    shared = set(sys.events[a - 1].vbl) & set(sys.events[b - 1].vbl)
    for x in shared:
        if sys.variables[x - 1].domain != 2:
            return False
        if not aligned(cross_section_monotone(sys, a, x)[0], cross_section_monotone(sys, b, x)[0]):
            return False
    return True


def verify_cutting_properties(sys: DiscreteEventSystem, plan, max_events: int = 8) -> CuttingReport:
    bad = standard_violation(sys)
    if bad is not None:
        raise EventError(f"system is not standard: variable {bad[0]} {bad[1]}")
    cut = cut_events(sys, plan)
    before = after = 0
    for i in range(1, sys.m + 1):
        before |= sys.mask(i)
        after |= cut.mask(i)
    base = sys.graph()
    lops = lopsidependency_check(cut, base, max(max_events, sys.m))
    checked, fails = 0, []
    for a, b in combinations(range(1, cut.m + 1), 2):
        if _all_aligned(cut, a, b):
            checked += 1
            ma, mb = cut.mask(a), cut.mask(b)
            if cut.measure(ma & mb) < cut.measure(ma) * cut.measure(mb):
                fails.append((a, b))
    unions, ufails = 0, []
    if sys.m <= max_events:
        nbr = {i: set(sys.events[i - 1].vbl) for i in range(1, sys.m + 1)}
        for labels in product(range(3), repeat=sys.m):
            K1 = tuple(i for i, t in enumerate(labels, 1) if t == 1)
            K2 = tuple(i for i, t in enumerate(labels, 1) if t == 2)
            if not K1 or not K2 or K1[0] > K2[0]:
                continue
            if set().union(*(nbr[i] for i in K1)) & set().union(*(nbr[i] for i in K2)):
                continue
            u1 = u2 = 0
            for i in K1:
                u1 |= cut.mask(i)
            for i in K2:
                u2 |= cut.mask(i)
            unions += 1
            if cut.measure(u1 & u2) < cut.measure(u1) * cut.measure(u2):
                ufails.append((K1, K2))
    return CuttingReport(before == after, lops, checked, tuple(fails), unions, tuple(ufails))


# -------------------------------------------- monotone lemmas, exhaustively

def _cube_section(A: int, x: int, nvars: int, value: int) -> frozenset:
    """Points of the section of A (a mask over {0,1}^nvars) at coordinate x."""
    bit = 1 << (nvars - 1 - x)
    return frozenset(pt & ~bit for pt in range(1 << nvars) if (A >> pt) & 1 and bool(pt & bit) == bool(value))


def _cube_direction(A: int, x: int, nvars: int) -> str:
    return _direction(_cube_section(A, x, nvars, 0), _cube_section(A, x, nvars, 1))


def _cube_measure(A: int, nvars: int, q) -> Fraction:
    """q[k] = Pr(X_k = 1)."""
    total = Fraction(0)
    for pt in range(1 << nvars):
        if (A >> pt) & 1:
            w = Fraction(1)
            for k in range(nvars):
                w *= q[k] if pt >> (nvars - 1 - k) & 1 else 1 - q[k]
            total += w
    return total


@dataclass(frozen=True)
class MonotoneLemmaReport:
    nvars: int
    pairs: int
    union_intersection_failures: int
    difference_failures: int
    correlation_checks: int
    correlation_failures: int

    @property
    def ok(self) -> bool:
        return not (self.union_intersection_failures or self.difference_failures or self.correlation_failures)


DEFAULT_BIASES = (Fraction(1, 2), Fraction(1, 3), Fraction(3, 4), Fraction(1, 5))


def verify_monotone_lemmas(nvars: int = 3, biases=DEFAULT_BIASES) -> MonotoneLemmaReport:
    """Closure and correlation facts for monotone events, over every pair of events on the cube."""
    npts = 1 << nvars
    events = range(1 << npts)
    dirs = {A: [_cube_direction(A, x, nvars) for x in range(nvars)] for A in events}
    depends = {A: [dirs[A][x] != "both" for x in range(nvars)] for A in events}
    mass_vectors = [tuple(biases[(k + s) % len(biases)] for k in range(nvars)) for s in range(len(biases))]
    measures = {qv: [_cube_measure(A, nvars, qv) for A in events] for qv in mass_vectors}
    ui = diff = corr_n = corr_bad = pairs = 0
    for A in events:
        for B in events:
            pairs += 1
            for x in range(nvars):
                da, db = dirs[A][x], dirs[B][x]
                common = DIRECTIONS[da] & DIRECTIONS[db]
                for d in common:
                    if d not in DIRECTIONS[dirs[A | B][x]] or d not in DIRECTIONS[dirs[A & B][x]]:
                        ui += 1
                for d in DIRECTIONS[da]:
                    if FLIP[d] in DIRECTIONS[db] and d not in DIRECTIONS[dirs[A & ~B][x]]:
                        diff += 1
            if all(aligned(dirs[A][x], dirs[B][x]) for x in range(nvars) if depends[A][x] and depends[B][x]):
                for qv in mass_vectors:
                    corr_n += 1
                    mu = measures[qv]
                    if mu[A & B] < mu[A] * mu[B]:
                        corr_bad += 1
    return MonotoneLemmaReport(nvars, pairs, ui, diff, corr_n, corr_bad)


# ---------------------------------------------------------------- fuzzing

def _monotone_closure(points: set, vbl, ups: set, downs: set) -> set:
    """Close a set of assignments under raising up-variables and lowering down-variables."""
    out = set(points)
    stack = list(points)
    while stack:
        a = stack.pop()
        for k, x in enumerate(vbl):
            if x in ups and a[k] == 0:
                b = a[:k] + (1,) + a[k + 1:]
            elif x in downs and a[k] == 1:
                b = a[:k] + (0,) + a[k + 1:]
            else:
                continue
            if b not in out:
                out.add(b)
                stack.append(b)
    return out


MASS_CHOICES = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4), Fraction(3, 5))


def random_standard_system(rng: random.Random, max_vars: int = 4, max_events: int = 4) -> DiscreteEventSystem:
    """Binary variables of degree <= 2, each shared pair monotone in opposite directions."""
    nv = rng.randint(1, max_vars)
    m = rng.randint(2, max_events)
    vbl = {i: set() for i in range(1, m + 1)}
    ups = {i: set() for i in range(1, m + 1)}
    downs = {i: set() for i in range(1, m + 1)}
    for x in range(1, nv + 1):
        users = rng.sample(range(1, m + 1), rng.choice((1, 2, 2)))
        for i in users:
            vbl[i].add(x)
        if len(users) == 2:
            a, b = users
            if rng.random() < 0.5:
                a, b = b, a
            ups[a].add(x)
            downs[b].add(x)
    variables = []
    for _ in range(nv):
        q = rng.choice(MASS_CHOICES)
        variables.append(Variable(2, (1 - q, q)))
    events = []
    for i in range(1, m + 1):
        vs = tuple(sorted(vbl[i]))
        pts = [a for a in product((0, 1), repeat=len(vs)) if rng.random() < 0.3]
        events.append(Event(vs, frozenset(_monotone_closure(set(pts), vs, ups[i], downs[i]))))
    return DiscreteEventSystem(tuple(variables), tuple(events))


def random_compatible_plan(rng: random.Random, sys: DiscreteEventSystem) -> CuttingPlan:
    cands = [(k, i) for i in range(1, sys.m + 1) if two_discrete(sys, i)
             for k in range(1, sys.m + 1)
             if k != i and set(sys.events[k - 1].vbl) & set(sys.events[i - 1].vbl)]
    rng.shuffle(cands)
    chosen = []
    used = set()
    for k, i in cands:
        vs = set(sys.events[i - 1].vbl)
        if vs & used or rng.random() < 0.3:
            continue
        chosen.append((k, i))
        used |= vs
    return CuttingPlan(tuple(sorted(chosen)))


# ------------------------------------------------------- extremal measure

def extremal_event_system(g, p) -> DiscreteEventSystem:
    """One variable Z over independent sets with Pr(Z = S) = mu(S); A_i = {i in Z}."""
    from .shearer import extremal_distribution

    d = as_dependency(g)
    mu = extremal_distribution(d, p)
    sets = list(mu)
    Z = Variable(len(sets), tuple(mu[s] for s in sets))
    events = tuple(Event((1,), frozenset((k,) for k, s in enumerate(sets) if i in s)) for i in range(1, d.m + 1))
    return DiscreteEventSystem((Z,), events)


def avoid_all_probability(sys: DiscreteEventSystem) -> Fraction:
    return event_prob(sys, ("not", ("or", *range(1, sys.m + 1)))) if sys.m else Fraction(1)
