import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearerlab.config import CapExceeded
from shearerlab.events import (
    DiscreteEventSystem, Event, EventError, Variable, avoid_all_probability, cross_section_monotone,
    cut_events, event_prob, extremal_event_system, lopsidependency_check, random_compatible_plan,
    random_standard_system, standard_violation, verify_cutting_properties, verify_monotone_lemmas,
)
from shearerlab.graphs import DependencyGraph
from shearerlab.shearer import ind_poly, shearer_check

BIT = Variable.uniform(2)


def bits(n, *events):
    return DiscreteEventSystem((BIT,) * n, tuple(Event.of(v, h) for v, h in events))


X_IS_1 = ((1,), [(1,)])
X0_Y1 = ((1, 2), [(0, 1)])
X1_Y1 = ((1, 2), [(1, 1)])


def test_probability_examples():
    sys = bits(2, X_IS_1, ((2,), [(1,)]), X0_Y1)
    assert event_prob(sys, 1) == F(1, 2)
    assert event_prob(sys, ("or", 1, 3)) == event_prob(sys, 1) + event_prob(sys, 3) == F(3, 4)
    assert event_prob(sys, 1, given=2) == event_prob(sys, 1)
    assert event_prob(sys, ("minus", 2, 3)) == F(1, 4)
    assert event_prob(sys, ("not", ("and", 1, 2))) == F(3, 4)


def test_conditioning_on_null_event():
    sys = bits(1, X_IS_1, ((1,), []))
    with pytest.raises(EventError, match="zero"):
        event_prob(sys, 1, given=2)


def test_biased_masses():
    coin = Variable(2, (F(1, 3), F(2, 3)))
    sys = DiscreteEventSystem((coin, Variable.uniform(3)), (Event.of((2, 1), [(2, 1), (0, 1)]),))
    assert event_prob(sys, 1) == F(2, 3) * F(2, 3)


def test_monotone_examples():
    sys = bits(2, ((2,), [(1,)]), X_IS_1, ((1, 2), [(0, 1), (1, 0), (1, 1)]))
    assert cross_section_monotone(sys, 1, 1)[0] == "both"
    assert cross_section_monotone(sys, 2, 1)[0] == "up"
    assert cross_section_monotone(sys, 3, 1)[0] == "up"
    tri = DiscreteEventSystem((Variable.uniform(3),), (Event.of((1,), [(1,)]),))
    with pytest.raises(EventError, match="binary"):
        cross_section_monotone(tri, 1, 1)


def test_cut_examples():
    sys = bits(2, X_IS_1, X1_Y1)
    cut = cut_events(sys, [(1, 2)])
    assert cut.events[0] == Event((1, 2), frozenset({(1, 0)}))
    assert (event_prob(sys, 1), event_prob(cut, 1)) == (F(1, 2), F(1, 4))
    assert cut_events(sys, []) == sys
    apart = bits(2, X_IS_1, X0_Y1)
    assert cut_events(apart, [(1, 2)]).mask(1) == apart.mask(1)


def test_cut_validation():
    sys = bits(3, X_IS_1, X0_Y1, ((2, 3), [(1, 1)]), ((3,), [(0,)]))
    with pytest.raises(EventError, match="incompatible"):
        cut_events(sys, [(1, 2), (4, 3)])
    with pytest.raises(EventError, match="share no variable"):
        cut_events(sys, [(1, 4)])
    crowded = bits(1, X_IS_1, X_IS_1, X_IS_1)
    with pytest.raises(EventError, match="2-discrete"):
        cut_events(crowded, [(1, 2)])


def test_lopsidependency_examples():
    indep = bits(2, X_IS_1, ((2,), [(1,)]))
    assert lopsidependency_check(indep, DependencyGraph.from_edges(2, [])).ok
    clash = bits(1, X_IS_1, ((1,), [(0,)]))
    verdict = lopsidependency_check(clash, DependencyGraph.from_edges(2, []))
    assert not verdict and verdict.counterexample == (1, (2,))
    assert lopsidependency_check(clash, DependencyGraph.complete(2)).ok


def test_cutting_properties_examples():
    sys = bits(2, X_IS_1, X0_Y1)
    for plan in ([(1, 2)], []):
        rep = verify_cutting_properties(sys, plan)
        assert rep.ok and rep.union_preserved
    with pytest.raises(EventError, match="not standard"):
        verify_cutting_properties(bits(2, X_IS_1, X1_Y1), [(1, 2)])


def test_standardness():
    assert standard_violation(bits(2, X_IS_1, X0_Y1)) is None
    assert standard_violation(bits(2, X_IS_1, X1_Y1))[0] == 1
    ternary = DiscreteEventSystem((Variable.uniform(3),), (Event.of((1,), [(1,)]), Event.of((1,), [(0,)])))
    assert "binary" in standard_violation(ternary)[1]


def test_json_round_trip():
    sys = DiscreteEventSystem((Variable(2, (F(1, 4), F(3, 4))), Variable.uniform(3)),
                              (Event.of((2, 1), [(0, 1), (2, 0)]),))
    assert DiscreteEventSystem.from_json(sys.to_json()) == sys
    with pytest.raises(EventError):
        DiscreteEventSystem.from_json({"variables": [{"domain": 2}]})


def test_invalid_systems():
    with pytest.raises(EventError):
        Variable(2, (F(1, 2), F(1, 3)))
    with pytest.raises(EventError):
        bits(1, ((2,), [(1,)]))
    with pytest.raises(EventError):
        bits(1, ((1,), [(2,)]))
    with pytest.raises(CapExceeded):
        DiscreteEventSystem((BIT,) * 21, ())


def test_monotone_lemmas():
    for n in (1, 2, 3):
        assert verify_monotone_lemmas(n).ok
    assert verify_monotone_lemmas(2, (F(1, 7), F(5, 6))).ok


@given(st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_cutting_fuzz(seed):
    rng = random.Random(seed)
    sys = random_standard_system(rng)
    assert standard_violation(sys) is None
    plan = random_compatible_plan(rng, sys)
    rep = verify_cutting_properties(sys, plan)
    assert rep.ok, rep


@given(st.integers(1, 4), st.data())
@settings(max_examples=80, deadline=None)
def test_extremal_realization(m, data):
    pairs = [(a, b) for a in range(1, m + 1) for b in range(a + 1, m + 1)]
    edges = data.draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    g = DependencyGraph.from_edges(m, edges)
    p = data.draw(st.lists(st.fractions(F(1, 20), F(1, 2), max_denominator=20), min_size=m, max_size=m))
    if not shearer_check(g, p).in_bound:
        return
    sys = extremal_event_system(g, p)
    assert avoid_all_probability(sys) == ind_poly(g, p)
    assert [event_prob(sys, i) for i in range(1, m + 1)] == list(p)
    for a, b in edges:
        assert event_prob(sys, ("and", a, b)) == 0
