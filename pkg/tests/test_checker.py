import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from l2sprophecy import checker
from l2sprophecy.checker import (
    CTI, HOLDS, INCONCLUSIVE, LASSO, NO_LASSO, CheckResult, closure_harness, export_vcs,
    search_abstract_lasso, union_spec, validate_witness,
)
from l2sprophecy.corpus import load_corpus_entry
from l2sprophecy.l2s import ProphecySpec, build_monitor, build_witness_system, make_witness, mine_prophecy, \
    resolve_invariant
from l2sprophecy.parser import parse_foltl
from l2sprophecy.randgen import random_formula, random_system, toy_vocab
from l2sprophecy.syntax import And, Const, Globally, Rel
from l2sprophecy.ts import Explorer

V = toy_vocab(2)


@pytest.fixture(scope="module")
def ticket_lasso():
    e = load_corpus_entry("ticket")
    W = e.witness_system(with_prophecy=False)
    res = search_abstract_lasso(W, e.bounds, e.maxlen, e.hooks)
    assert res.verdict == LASSO
    return e, W, res.witness


class TestValidator:
    def test_found_lasso_is_valid(self, ticket_lasso):
        e, W, w = ticket_lasso
        assert validate_witness(w, W, e.hooks) == []

    @pytest.mark.parametrize("change", [
        dict(i=5, j=4), dict(k=0), dict(j=None),
    ])
    def test_bad_indices(self, ticket_lasso, change):
        e, W, w = ticket_lasso
        if change.get("j", 0) is None:
            change = dict(j=w.k)
        bad = dataclasses.replace(w, **change)
        assert validate_witness(bad, W, e.hooks)

    def test_not_initial(self, ticket_lasso):
        e, W, w = ticket_lasso
        tr = (w.trace[1],) + w.trace[1:]
        probs = validate_witness(dataclasses.replace(w, trace=tr), W, e.hooks)
        assert any("not initial" in p for p in probs)

    def test_broken_step(self, ticket_lasso):
        e, W, w = ticket_lasso
        tr = list(w.trace)
        # a state repeated out of order is (almost always) no transition
        tr[2], tr[3] = tr[3], tr[2]
        probs = validate_witness(dataclasses.replace(w, trace=tuple(tr)), W, e.hooks)
        assert any("not a transition" in p for p in probs)

    def test_wrong_freeze_footprint(self, ticket_lasso):
        e, W, w = ticket_lasso
        fp = {k: frozenset() for k in w.fp_i}
        probs = validate_witness(dataclasses.replace(w, fp_i=fp), W, e.hooks)
        assert any("freeze footprint" in p for p in probs)

    def test_loop_must_close_on_projection(self, ticket_lasso):
        e, W, w = ticket_lasso
        # stopping the loop one state early breaks projection equality or fairness
        short = dataclasses.replace(w, k=w.k - 1, trace=w.trace[:w.k])
        if short.k > short.j:
            assert validate_witness(short, W, e.hooks)


class TestResults:
    def test_exit_codes(self):
        assert CheckResult(LASSO).exit_code == 1
        assert CheckResult(CTI).exit_code == 1
        assert CheckResult(INCONCLUSIVE).exit_code == 2
        assert CheckResult(NO_LASSO).exit_code == 0
        assert CheckResult(HOLDS).exit_code == 0

    def test_node_budget_is_inconclusive(self):
        e = load_corpus_entry("ticket")
        res = search_abstract_lasso(e.witness_system(), e.bounds, e.maxlen, e.hooks, node_budget=50)
        assert res.verdict == INCONCLUSIVE and "budget" in res.reason

    def test_time_budget_is_inconclusive(self):
        e = load_corpus_entry("ticket")
        res = search_abstract_lasso(e.witness_system(), e.bounds, e.maxlen, e.hooks, time_budget=0.01)
        assert res.verdict == INCONCLUSIVE

    def test_short_maxlen_is_not_exhausted(self):
        e = load_corpus_entry("ticket")
        res = search_abstract_lasso(e.witness_system(), e.bounds, 2, e.hooks)
        assert res.verdict == NO_LASSO and not res.stats.exhausted

    def test_maxlen_must_be_positive(self):
        e = load_corpus_entry("toggle")
        with pytest.raises(ValueError):
            search_abstract_lasso(e.witness_system(), e.bounds, 0)


def _instance(seed):
    rng = random.Random(seed)
    S = random_system(rng, V)
    g = random_formula(rng, V, 2, rng.randint(1, 5))
    spec = ProphecySpec()
    if rng.random() < 0.5:
        spec = ProphecySpec([random_formula(rng, V, 2, 3)])
    return build_witness_system(S, g, spec)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([1, 2, 3]))
def test_engines_agree(seed, size):
    W = _instance(seed)
    a = search_abstract_lasso(W, {"e": size}, 30, engine="grouped")
    b = search_abstract_lasso(W, {"e": size}, 30, engine="flat")
    assert a.verdict == b.verdict
    assert a.stats.exhausted == b.stats.exhausted
    if a.verdict == LASSO:
        # breadth-first: both find a shortest lasso
        assert len(a.witness.trace) == len(b.witness.trace)


class TestInvariants:
    def _mon(self, name):
        e = load_corpus_entry(name)
        spec = mine_prophecy(e.invariant, e.goal)
        mon = build_monitor(build_witness_system(e.system, e.goal, spec), hooks=e.hooks)
        return e, mon, resolve_invariant(e.invariant, mon)

    def test_toggle_holds(self):
        e, mon, conjs = self._mon("toggle")
        res = checker.check_inductive_invariant(mon, conjs, {"elem": 2})
        assert res.verdict == HOLDS and res.checked > 0

    def test_dropping_a_conjecture_gives_valid_cti(self):
        e, mon, conjs = self._mon("toggle")
        for k in range(len(conjs)):
            rest = conjs[:k] + conjs[k + 1:]
            res = checker.check_inductive_invariant(mon, rest, {"elem": 2})
            assert res.verdict == CTI
            assert checker.cti_is_valid(mon, rest, res.cti)

    def test_export(self, tmp_path):
        e, mon, conjs = self._mon("toggle")
        files = export_vcs(mon, conjs, str(tmp_path))
        assert sorted(files) == sorted(checker.VC_FILES)
        for fn, text in files.items():
            assert (tmp_path / fn).read_text() == text
            assert text.rstrip().endswith("(check-sat)")
            assert "no_recurrence" in text
        assert "(declare-sort" in files["init.smt2"]


class TestClosure:
    def test_union_renames_clashing_constants(self):
        g1 = parse_foltl("(globally (p0 k))", V)
        g2 = parse_foltl("(globally (p1 k))", V)
        w1 = make_witness(Globally(Rel("p0", (Const("w"),))), {"w": "e"})
        w2 = make_witness(Globally(Rel("p1", (Const("w"),))), {"w": "e"})
        u = union_spec([g1, g2], [ProphecySpec([], [w1]), ProphecySpec([], [w2])])
        assert [w.consts for w in u.witnesses] == [("w",), ("w_2",)]
        assert len(u.extra) == 2

    def test_union_shares_identical_witnesses(self):
        g = parse_foltl("(globally (p0 k))", V)
        w = make_witness(Globally(Rel("p0", (Const("w"),))), {"w": "e"})
        u = union_spec([g, g], [ProphecySpec([], [w]), ProphecySpec([], [w])])
        assert len(u.witnesses) == 1 and len(u.extra) == 1

    def test_conjunction(self):
        e = load_corpus_entry("toggle")
        g = e.goal
        rep = closure_harness(e.system, [g, g], And((g, g)), [ProphecySpec(), ProphecySpec()], e.bounds, e.maxlen,
                              e.hooks)
        assert rep.applicable and not rep.violation
        assert rep.conclusion.verdict == NO_LASSO

    def test_one_spec_per_goal(self):
        e = load_corpus_entry("toggle")
        with pytest.raises(ValueError):
            closure_harness(e.system, [e.goal], e.goal, [], e.bounds, 5)


def test_monitor_error_trace_matches_ticket():
    e = load_corpus_entry("toggle")
    mon = build_monitor(e.witness_system(), hooks=e.hooks)
    assert checker.monitor_error_trace(mon, e.bounds) is None
    assert Explorer(mon.system, e.bounds).initial_states()
