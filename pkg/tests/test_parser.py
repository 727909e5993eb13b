import pytest

from l2sprophecy.logic import evaluate
from l2sprophecy.parser import SortMismatch, load_model, load_property, parse_formula, parse_foltl
from l2sprophecy.sexpr import ParseError
from l2sprophecy.syntax import Forall, Globally
from l2sprophecy.ts import Explorer

COUNTER = """
(name counter)
(sort num)
(relation le num num)
(interpret le (order num))
(relation succ num num)
(interpret succ (successor num))
(constant zero num)
(interpret zero (min num))
(constant c num)
(relation hit num)
(init (= c zero) (forall (x num) (not (hit x))))
(action up
  (guard (not (= c zero)) )
  (update (succ c c'))
  (frame hit))
(action reset
  (havoc c)
  (update (forall (x num) (iff (hit' x) (or (hit x) (= x c))))))
(footprint-closure num (downward le))
"""


def model():
    return load_model(COUNTER, "counter.model")


class TestModel:
    def test_declarations(self):
        m = model()
        assert m.name == "counter"
        assert m.vocab.sorts == ("num",)
        assert m.hooks == {"num": "le"}
        assert [a.name for a in m.actions] == ["up", "reset"]
        assert m.actions[0].modified == ("c",)
        assert m.actions[1].havoc == ("c",)

    def test_transitions(self):
        m = model()
        ex = Explorer(m.system, {"num": 3})
        (s0,) = ex.initial_states()
        assert s0.const("c") == 0 and not s0.rel("hit")
        # from c = 0 only reset applies: c is havocked and hit gains 0
        succ = ex.successors(s0)
        assert sorted(t.const("c") for t in succ) == [0, 1, 2]
        assert all(t.rel("hit") == {(0,)} for t in succ)
        # up keeps hit (frame) and moves c one step up
        s2 = [t for t in succ if t.const("c") == 1][0]
        ups = [t for t in ex.successors(s2) if t.rel("hit") == s2.rel("hit") and t.const("c") == 2]
        assert ups

    def test_symbols_not_mentioned_keep_their_value(self):
        m = load_model("(sort s)(relation p)(relation q)(init (not p) (not q))(action a (update p'))")
        ex = Explorer(m.system, {"s": 1})
        (s0,) = ex.initial_states()
        (t,) = ex.successors(s0)
        assert t.rel("p") and not t.rel("q")

    def test_raw_transition(self):
        m = load_model("(sort s)(relation p)(init p)(transition (iff p' (not p)))")
        ex = Explorer(m.system, {"s": 1})
        (s0,) = ex.initial_states()
        assert [bool(t.rel("p")) for t in ex.successors(s0)] == [False]


@pytest.mark.parametrize("text, fragment", [
    ("(sort s)(relation p s", "unclosed"),
    ("(sort s)(frobnicate)", "unknown form"),
    ("(sort s)(relation p s)(init (p))", "expects 1 argument"),
    ("(sort s)(relation p s)(init (q x))", "unknown relation"),
    ("(sort s)(relation p)(init p')", "primed"),
    ("(sort s)(relation p)(action a (guard p') (update p'))", "post-state"),
    ("(sort s)(relation p)(action a (update p') (frame p))", "both updates and frames"),
    ("(sort s)(relation p)(init (globally p))", "temporal"),
    ("(sort s)(relation le s s)(interpret le (order t))", "over t"),
    ("(sort s)(relation le s s)(footprint-closure s (downward le))", "must be static"),
])
def test_model_errors(text, fragment):
    with pytest.raises(ParseError) as e:
        load_model(text, "bad.model")
    assert fragment in str(e.value)
    assert str(e.value).startswith("bad.model:")


def test_error_positions():
    with pytest.raises(ParseError) as e:
        load_model("(sort s)\n(relation p s)\n(init\n   (p s q))", "m")
    assert (e.value.line, e.value.col) == (4, 4)


class TestFormulas:
    def test_sort_mismatch(self):
        m = load_model("(sort a b)(relation r a)(constant k b)")
        with pytest.raises(SortMismatch):
            parse_formula("(r k)", m.vocab)
        with pytest.raises(SortMismatch):
            parse_formula("(= X Y)", m.vocab)

    def test_equality_infers_sort(self):
        m = load_model("(sort a)(constant k a)")
        f = parse_formula("(= X k)", m.vocab)
        assert evaluate_closed(m, f)

    def test_property_is_closed(self):
        m = model()
        g = load_property("(property (globally (eventually (hit X))))", m.vocab)
        assert isinstance(g, Forall) and isinstance(g.body, Globally)

    def test_property_needs_one_formula(self):
        m = model()
        with pytest.raises(ParseError):
            load_property("(hit c) (hit c)", m.vocab)

    def test_sugar(self):
        m = model()
        a = parse_foltl("(<> ([] (-> (hit c) (hit zero))))", m.vocab)
        b = parse_foltl("(eventually (always (implies (hit c) (hit zero))))", m.vocab)
        assert a == b
        ite = parse_formula("(ite (hit c) (= c zero) (!= c zero))", m.vocab)
        assert ite is not None


def evaluate_closed(m, f):
    from l2sprophecy.ts import blank_structure
    from l2sprophecy.syntax import forall, free_vars_ordered
    return evaluate(blank_structure(m.vocab, {"a": 1}), forall(free_vars_ordered(f), f))
