import random

import pytest
from hypothesis import given, settings, strategies as st

from l2sprophecy.foltl import (
    ClosureSet, LassoTrace, box_relation_name, canonical, canonical_vars, is_normal, ltl_eval, naive_ltl_eval,
    normalize, subformula_closure, subformulas,
)
from l2sprophecy.logic import SpecificationError, Structure, all_structures
from l2sprophecy.parser import parse_foltl
from l2sprophecy.randgen import random_formula, random_lasso, toy_vocab
from l2sprophecy.syntax import Const, Eventually, Exists, Globally, Not, Or, Rel, Var, temporal_depth

V = toy_vocab(2)
POOL = {n: list(all_structures(V, {"e": n})) for n in (1, 2)}
seeds = st.integers(0, 10 ** 9)


def state(p0=(), p1=(), k=0, size=2):
    return Structure.build(V, {"e": size}, {"k": k}, {"p0": [(x,) for x in p0], "p1": [(x,) for x in p1]})


def F(text):
    return parse_foltl(text, V)


class TestLtlEval:
    def test_hand_computed(self):
        a, b = state(p0=[0]), state()
        pi = LassoTrace((b,), (a, b))
        assert ltl_eval(pi, 0, F("(globally (eventually (p0 k)))"))
        assert not ltl_eval(pi, 0, F("(eventually (globally (p0 k)))"))
        assert not ltl_eval(pi, 0, F("(p0 k)"))
        assert ltl_eval(pi, 1, F("(p0 k)"))
        # the stem state is never seen again
        stuck = LassoTrace((a,), (b,))
        assert ltl_eval(stuck, 0, F("(eventually (globally (not (p0 k))))"))
        assert not ltl_eval(stuck, 1, F("(eventually (p0 k))"))

    def test_quantifier_over_time(self):
        # element 0 in p0 in one loop state, element 1 in the other:
        # every element recurs, but no element stays forever
        a, b = state(p0=[0]), state(p0=[1])
        pi = LassoTrace((), (a, b))
        assert ltl_eval(pi, 0, F("(forall (x e) (globally (eventually (p0 x))))"))
        assert not ltl_eval(pi, 0, F("(exists (x e) (globally (p0 x)))"))
        assert ltl_eval(pi, 0, F("(globally (exists (x e) (p0 x)))"))

    def test_index_out_of_range(self):
        pi = LassoTrace((), (state(),))
        with pytest.raises(IndexError):
            ltl_eval(pi, 1, F("(p0 k)"))

    def test_free_variable_needs_assignment(self):
        pi = LassoTrace((), (state(p0=[1]),))
        x = Var("X", "e")
        assert ltl_eval(pi, 0, Globally(Rel("p0", (x,))), {x: 1})
        with pytest.raises(SpecificationError):
            ltl_eval(pi, 0, Globally(Rel("p0", (x,))))

    def test_lasso_rejects_mixed_domains(self):
        with pytest.raises(ValueError):
            LassoTrace((state(size=1),), (state(size=2),))
        with pytest.raises(ValueError):
            LassoTrace((state(),), ())


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_ltl_eval_matches_unrolling(seed):
    rng = random.Random(seed)
    size = rng.choice((1, 2))
    pi = random_lasso(rng, V, {"e": size}, 3, 3, POOL[size])
    f = random_formula(rng, V, rng.randint(0, 3), rng.randint(1, 6))
    for i in range(len(pi.stem) + 1):
        assert ltl_eval(pi, i, f) == naive_ltl_eval(pi, i, f)


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(0, 2))
def test_lasso_representation_does_not_matter(seed, times, shift):
    """Repeating the loop or moving loop states into the stem describes the same trace."""
    rng = random.Random(seed)
    pi = random_lasso(rng, V, {"e": 2}, 2, 3, POOL[2])
    f = random_formula(rng, V, 2, rng.randint(1, 6))
    shift = shift % len(pi.loop)
    loop = pi.loop[shift:] + pi.loop[:shift]
    same = LassoTrace(pi.stem + pi.loop[:shift], loop * times)
    assert ltl_eval(pi, 0, f) == ltl_eval(same, 0, f)


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_normalize_preserves_meaning(seed):
    rng = random.Random(seed)
    pi = random_lasso(rng, V, {"e": 2}, 2, 3, POOL[2])
    f = random_formula(rng, V, 2, rng.randint(1, 7))
    g = normalize(f)
    assert is_normal(g)
    assert normalize(g) == g
    assert ltl_eval(pi, 0, f) == ltl_eval(pi, 0, g)


class TestClosure:
    def test_sub_of_negated_goal(self):
        goal = F("(globally (eventually (p0 k)))")
        A = subformula_closure([Not(goal)])
        boxes = {str(b) for b in A.boxes()}
        # ~[]~[]~p0(k): boxes []~[]~p0(k) and []~p0(k)
        assert len(boxes) == 2
        assert A.is_closed()
        assert normalize(Not(goal)) in A

    def test_closed_under_subformulas(self):
        rng = random.Random(3)
        for _ in range(200):
            roots = [random_formula(rng, V, 2, rng.randint(1, 6)) for _ in range(3)]
            A = subformula_closure(roots)
            assert A.is_closed()
            for f in A:
                for g in subformulas(f):
                    assert g in A

    def test_alpha_equivalent_formulas_are_one_member(self):
        f1 = F("(forall (x e) (globally (p0 x)))")
        f2 = F("(forall (y e) (globally (p0 y)))")
        assert len(subformula_closure([f1, f2])) == len(subformula_closure([f1]))

    def test_box_names(self):
        b = normalize(F("(globally (p0 k))"))
        assert isinstance(b, Globally)
        assert box_relation_name(b) == "<p0(k)>"


class TestCanonical:
    def test_free_variables_become_positional(self):
        x, y = Var("x", "e"), Var("y", "e")
        f1 = Globally(Rel("p0", (x,)))
        f2 = Globally(Rel("p0", (y,)))
        c1, a1 = canonical(f1)
        c2, a2 = canonical(f2)
        assert c1 == c2 and a1 == (x,) and a2 == (y,)
        assert len(canonical_vars(c1)) == 1

    def test_abstract_constants(self):
        f = Globally(Or((Rel("p0", (Const("w"),)), Rel("p1", (Const("k"),)))))
        c, args = canonical(f, {"w": "e"})
        assert args == (Const("w"),)
        assert len(canonical_vars(c)) == 1

    def test_bound_variables(self):
        y = Var("y", "e")
        f = Exists((y,), Globally(Rel("p0", (y,))))
        c, args = canonical(f)
        assert args == ()
        assert temporal_depth(c) == 1


def test_closure_set_equality_ignores_order():
    a, b = F("(p0 k)"), F("(eventually (p1 k))")
    assert ClosureSet([a, b]) == ClosureSet([b, a])
    assert normalize(Eventually(a)) != Eventually(a)
