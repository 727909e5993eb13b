import random

import pytest
from hypothesis import given, settings, strategies as st

from l2sprophecy import checker
from l2sprophecy.corpus import load_corpus_entry
from l2sprophecy.l2s import (
    FLAGS, ProphecySpec, a_name, build_monitor, build_witness_system, d_name, footprint, make_witness,
    mine_prophecy, parse_invariant, parse_prophecy, resolve_invariant, s_name, segment_fair, trace_footprint,
    w_name,
)
from l2sprophecy.logic import SpecificationError, evaluate
from l2sprophecy.parser import load_model
from l2sprophecy.randgen import random_formula, random_open_formula, random_system, toy_vocab
from l2sprophecy.sexpr import ParseError
from l2sprophecy.syntax import Const, Exists, Globally, Not, Rel, substitute
from l2sprophecy.tableau import fo_translate
from l2sprophecy.ts import Explorer

V = toy_vocab(2)


class TestFootprint:
    def test_constants_only(self):
        e = load_corpus_entry("toggle")
        s = Explorer(e.system, {"elem": 2}).initial_states()[0]
        assert footprint(s) == {"elem": frozenset()}

    def test_downward_hook(self):
        e = load_corpus_entry("counter-loop")
        ex = Explorer(e.system, {"num": 4})
        (s0,) = ex.initial_states()
        assert footprint(s0, e.hooks) == {"num": frozenset({0})}
        high = [t for t in ex.successors(s0) if t.const("c") == 2][0]
        # c = 2 pulls in everything below it
        assert footprint(high, e.hooks) == {"num": frozenset({0, 1, 2})}
        assert footprint(high) == {"num": frozenset({0, 2})}

    def test_trace_footprint_grows(self):
        e = load_corpus_entry("counter-loop")
        ex = Explorer(e.system, {"num": 3})
        (s0,) = ex.initial_states()
        s1 = [t for t in ex.successors(s0) if t.const("c") == 1][0]
        s2 = ex.successors(s1)[0]
        pi = [s0, s1, s2]
        sets = [trace_footprint(pi, i, e.hooks)["num"] for i in range(3)]
        assert sets[0] <= sets[1] <= sets[2]
        with pytest.raises(IndexError):
            trace_footprint(pi, 3)

    def test_segment_fair(self):
        e = load_corpus_entry("toggle")
        W = e.witness_system()
        ex = Explorer(W, e.bounds)
        s0 = ex.initial_states()[0]
        s1 = ex.successors(s0)[0]
        F = {"elem": frozenset()}
        # toggle's boxes take no arguments, so they are checked even on an
        # empty footprint: a segment is fair iff each box's constraint holds
        # in one of its states
        boxes = W.artifacts.boxes
        assert boxes and all(not b.vars for b in boxes)
        for seg in ([s0], [s1], [s0, s1]):
            want = all(any(evaluate(x, b.fair) for x in seg) for b in boxes)
            assert segment_fair(seg, 0, len(seg) - 1, W.artifacts, F) == want
        with pytest.raises(IndexError):
            segment_fair([s0], 0, 1, W.artifacts, F)


class TestMonitor:
    def test_vocabulary(self):
        e = load_corpus_entry("ticket")
        mon = build_monitor(e.witness_system(), hooks=e.hooks)
        names = set(mon.vocab.symbol_names())
        assert set(FLAGS) <= names
        for sort in ("thread", "number"):
            assert {d_name(sort), a_name(sort)} <= names
        for b in mon.t.boxes:
            assert {w_name(1, b.name), w_name(2, b.name), s_name(b.name)} <= names
        # saved copies of every non-static symbol, witness constants included
        for n in ("n", "s", "m", "q", "wait", "c1", "c2"):
            assert s_name(n) in names
        assert s_name("le") not in names

    def test_initial_state_is_unfrozen(self):
        e = load_corpus_entry("toggle")
        mon = build_monitor(e.witness_system(), hooks=e.hooks)
        for s in Explorer(mon.system, e.bounds).initial_states():
            assert not s.rel("l2s_frozen") and not s.rel("l2s_saved") and not s.rel("l2s_stepped")
            assert not evaluate(s, mon.error)


def _random_instance(rng, with_prophecy):
    S = random_system(rng, V)
    g = random_formula(rng, V, 2, rng.randint(1, 4))
    spec = ProphecySpec()
    if with_prophecy:
        f, z = random_open_formula(rng, V, 2, 3)
        ws = [make_witness(substitute(f, {z: Const("w")}), {"w": "e"})] if rng.random() < 0.6 else []
        spec = ProphecySpec([random_formula(rng, V, 2, 3)], ws)
    return S, g, spec


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 9), st.booleans(), st.sampled_from([1, 2]))
def test_formula_monitor_agrees_with_explicit_search(seed, with_prophecy, size):
    """Error reachable in the first-order monitor iff the explicit engine finds an abstract lasso."""
    S, g, spec = _random_instance(random.Random(seed), with_prophecy)
    W = build_witness_system(S, g, spec)
    path = checker.monitor_error_trace(build_monitor(W), {"e": size})
    res = checker.search_abstract_lasso(W, {"e": size}, 60)
    assert res.stats.exhausted or res.verdict == checker.LASSO
    assert (path is not None) == (res.verdict == checker.LASSO)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([1, 2]))
def test_witness_axiom_holds_initially(seed, size):
    rng = random.Random(seed)
    S, g, spec = _random_instance(rng, True)
    W = build_witness_system(S, g, spec)
    for w in W.witnesses:
        body = fo_translate(w.formula, W.artifacts)
        from l2sprophecy.foltl import canonical_vars
        vs = canonical_vars(w.formula)
        inst = substitute(body, {v: Const(c) for v, c in zip(vs, w.consts)})
        for s in Explorer(W, {"e": size}).initial_states():
            if evaluate(s, Exists(vs, body)):
                assert evaluate(s, inst)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_witness_constants_never_change(seed):
    rng = random.Random(seed)
    S, g, spec = _random_instance(rng, True)
    W = build_witness_system(S, g, spec)
    order, edges = Explorer(W, {"e": 2}).reachable()
    for s in order:
        for t in edges[s]:
            assert all(s.const(c) == t.const(c) for c in W.witness_constants)


class TestProphecyFiles:
    def test_ticket_counts(self):
        e = load_corpus_entry("ticket")
        assert e.prophecy.counts(e.goal) == (1, 2)
        assert [w.consts for w in e.prophecy.witnesses] == [("c1",), ("c2",)]

    def test_abp_counts(self):
        e = load_corpus_entry("abp")
        assert e.prophecy.counts(e.goal) == (4, 1)

    def test_sub_goal_formulas_do_not_count(self):
        e = load_corpus_entry("toggle")
        spec = ProphecySpec([Globally(Not(Rel("flag")))])
        assert spec.counts(e.goal) == (0, 0)
        spec = ProphecySpec([Globally(Rel("flag"))])
        assert spec.counts(e.goal) == (1, 0)

    @pytest.mark.parametrize("text, fragment", [
        ("(witness (flag elem) for (globally flag))", "clashes"),
        ("(witness (c nosort) for (globally flag))", "unknown sort"),
        ("(witness (c elem) for (globally flag))", "each witness constant"),
        ("(witness c for flag)", "expected (witness"),
        ("(prophecy (globally nope))", "unknown"),
    ])
    def test_errors(self, text, fragment):
        m = load_corpus_entry("toggle").model
        with pytest.raises(ParseError) as e:
            parse_prophecy(text, m.vocab)
        assert fragment in str(e.value)

    def test_make_witness(self):
        w = make_witness(Globally(Rel("p0", (Const("w"),))), {"w": "e"})
        assert w.consts == ("w",) and w.sorts == ("e",)
        with pytest.raises(SpecificationError):
            make_witness(Globally(Rel("p0", (Const("k"),))), {"w": "e"})


class TestInvariantFiles:
    def test_toggle_conjectures(self):
        e = load_corpus_entry("toggle")
        names = [c.name for c in e.invariant.conjectures]
        assert names == ["no_recurrence", "pending", "frozen_dead", "phases", "never_stepped"]

    def test_waiting_relation_gets_a_box(self):
        e = load_corpus_entry("toggle")
        spec = mine_prophecy(e.invariant, e.goal)
        mon = build_monitor(build_witness_system(e.system, e.goal, spec), hooks=e.hooks)
        conjs = resolve_invariant(e.invariant, mon)
        pending = [c for c in conjs if c.name == "pending"][0]
        assert any(n.startswith("l2s_w") for n in _rel_names(pending.formula))
        # resolved conjectures are first order over the monitor vocabulary
        for c in conjs:
            from l2sprophecy.logic import check_formula
            check_formula(c.formula, mon.vocab, allow_temporal=False)

    def test_unknown_form(self):
        m = load_corpus_entry("toggle").model
        with pytest.raises(ParseError):
            parse_invariant("(lemma x flag)", m.vocab)

    def test_missing_witness_in_system(self):
        m = load_model("(sort e)(relation p e)(init (forall (x e) (p x)))(transition true)")
        inv = parse_invariant("(witness (c e) for (globally (p c)))\n(conjecture a (p c))", m.vocab)
        from l2sprophecy.parser import parse_foltl
        goal = parse_foltl("(forall (x e) (globally (p x)))", m.vocab)
        W = build_witness_system(m.system, goal, ProphecySpec())
        with pytest.raises(SpecificationError):
            resolve_invariant(inv, build_monitor(W))


def _rel_names(f):
    from l2sprophecy.syntax import symbols
    return symbols(f)
