import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from l2sprophecy.corpus import load_corpus_entry
from l2sprophecy.foltl import LassoTrace, ltl_eval, subformula_closure
from l2sprophecy.l2s import ProphecySpec
from l2sprophecy.logic import SpecificationError, evaluate, restrict
from l2sprophecy.parser import parse_foltl
from l2sprophecy.randgen import random_formula, random_system, template_system, toy_vocab
from l2sprophecy.syntax import Not
from l2sprophecy.tableau import (
    UnhousedSubformula, fairness_instances, find_fair_lasso, fo_translate, is_fair_trace, local_consistency,
    make_tableau, product_system,
)
from l2sprophecy.ts import Explorer

V = toy_vocab(2)


def F(text, vocab=V):
    return parse_foltl(text, vocab)


class TestConstruction:
    def test_ticket_boxes(self):
        e = load_corpus_entry("ticket")
        plain = make_tableau(e.system.vocab, ProphecySpec().closure(e.goal))
        full = make_tableau(e.system.vocab, e.prophecy.closure(e.goal))
        # sub(~goal): []<>scheduled(x) gives two boxes, [](wait(y) -> <>critical(y)) two more
        assert len(plain.boxes) == 4
        # the prophecy adds []critical(x) and []~[]critical(x)
        assert len(full.boxes) == 6
        assert {b.name for b in plain.boxes} <= {b.name for b in full.boxes}

    def test_box_arity_follows_free_variables(self):
        t = make_tableau(V, subformula_closure([F("(forall (x e) (globally (p0 x)))"), F("(globally (p1 k))")]))
        arity = {b.name: len(b.vars) for b in t.boxes}
        assert arity == {"<p0(V1)>": 1, "<p1(k)>": 0}

    def test_fairness_instances(self):
        t = make_tableau(V, subformula_closure([F("(forall (x e) (globally (p0 x)))"), F("(globally (p1 k))")]))
        assert len(fairness_instances(t, {"e": 3})) == 3 + 1

    def test_unhoused(self):
        t = make_tableau(V, subformula_closure([F("(globally (p1 k))")]))
        assert fo_translate(F("(not (globally (p1 k)))"), t) is not None
        with pytest.raises(UnhousedSubformula):
            fo_translate(F("(globally (p0 k))"), t)

    def test_product_needs_negated_goal(self):
        S = random_system(random.Random(1), V)
        with pytest.raises(SpecificationError):
            product_system(S, F("(globally (p0 k))"), subformula_closure([F("(globally (p0 k))")]))


class TestFairLasso:
    def test_toggle(self):
        e = load_corpus_entry("toggle")
        P, t = product_system(e.system, e.goal, ProphecySpec().closure(e.goal))
        assert find_fair_lasso(P, t, e.bounds) is None
        bad = F("(eventually (globally flag))", e.system.vocab)
        P, t = product_system(e.system, bad, ProphecySpec().closure(bad))
        pi = find_fair_lasso(P, t, e.bounds)
        assert pi is not None
        base = LassoTrace(tuple(restrict(s, e.system.vocab) for s in pi.stem),
                          tuple(restrict(s, e.system.vocab) for s in pi.loop))
        assert not ltl_eval(base, 0, bad)

    def test_fairness_rules_out_unfair_cycles(self):
        # valid, since []b0 implies []<>b0; the product still has a cycle
        # (b0 forever, labelled as if <>b0 eventually stopped recurring)
        # that only fairness excludes
        v = toy_vocab(0, nullary=1, constant=False)
        S = template_system(v, ["any"], ["any"])
        goal = F("(or (globally (eventually b0)) (not (globally b0)))", v)
        P, t = product_system(S, goal, ProphecySpec().closure(goal))
        order, edges = Explorer(P, {"e": 1}).reachable()
        g = nx.DiGraph([(a, b) for a, bs in edges.items() for b in bs])
        assert list(nx.simple_cycles(g))
        assert find_fair_lasso(P, t, {"e": 1}) is None

    def test_wrong_vocabulary(self):
        e = load_corpus_entry("toggle")
        P, t = product_system(e.system, e.goal, ProphecySpec().closure(e.goal))
        s = Explorer(e.system, e.bounds).initial_states()[0]
        with pytest.raises(SpecificationError):
            is_fair_trace(LassoTrace((), (s,)), t)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([1, 2]))
def test_found_lasso_is_a_fair_trace_of_the_product(seed, size):
    rng = random.Random(seed)
    S = random_system(rng, V)
    g = random_formula(rng, V, 2, rng.randint(1, 5))
    P, t = product_system(S, g, subformula_closure([Not(g)]))
    pi = find_fair_lasso(P, t, {"e": size})
    if pi is None:
        return
    assert evaluate(pi.states[0], P.init)
    for x in range(len(pi)):
        assert evaluate(pi.states[x], P.trans, post=pi.states[pi.succ(x)])
    assert is_fair_trace(pi, t)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_local_consistency_where_a_successor_exists(seed):
    """A state with a tableau successor satisfies <phi> -> FO(phi)."""
    rng = random.Random(seed)
    S = random_system(rng, V)
    g = random_formula(rng, V, 2, rng.randint(1, 5))
    P, t = product_system(S, g, subformula_closure([Not(g)]))
    order, edges = Explorer(P, {"e": 2}).reachable()
    lc = local_consistency(t)
    for s in order:
        if edges[s]:
            assert evaluate(s, lc)
