import random

import pytest
from hypothesis import given, settings, strategies as st

from l2sprophecy.logic import SpecificationError, all_structures, evaluate
from l2sprophecy.randgen import random_system, toy_vocab
from l2sprophecy.syntax import Const, Eq, Rel, TRUE
from l2sprophecy.ts import Explorer, ResourceLimit, TransitionSystem, bounded_traces, successors

V = toy_vocab(2, nullary=1)
ALL = {n: list(all_structures(V, {"e": n})) for n in (1, 2)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([1, 2]))
def test_enumeration_matches_brute_force(seed, size):
    """Initial states and successors equal the structures satisfying init / trans."""
    S = random_system(random.Random(seed), V)
    ex = Explorer(S, {"e": size})
    assert set(ex.initial_states()) == {s for s in ALL[size] if evaluate(s, S.init)}
    for s in random.Random(seed).sample(ALL[size], min(4, len(ALL[size]))):
        assert set(ex.successors(s)) == {t for t in ALL[size] if evaluate(s, S.trans, post=t)}


def test_bounded_traces_are_traces():
    S = random_system(random.Random(11), V)
    ex = Explorer(S, {"e": 1})
    n = 0
    for tr in bounded_traces(S, {"e": 1}, 3, ex):
        n += 1
        assert tr[0] in ex.initial_states()
        for a, b in zip(tr, tr[1:]):
            assert evaluate(a, S.trans, post=b)
    assert n >= 1


def test_successors_helper_checks_trans():
    S = random_system(random.Random(5), V)
    s = ALL[1][0]
    assert set(successors(S, s)) == set(Explorer(S, {"e": 1}).successors(s))


def test_reachable_limit():
    S = TransitionSystem(V, TRUE, TRUE)
    with pytest.raises(ResourceLimit):
        Explorer(S, {"e": 2}).reachable(limit=5)


def test_symmetry_reduction_keeps_one_per_orbit():
    S = TransitionSystem(V, Eq(Const("k"), Const("k")), TRUE)
    plain = Explorer(S, {"e": 2}).initial_states()
    reduced = Explorer(S, {"e": 2}, symmetry=True).initial_states()
    # 2^2 * 2^2 * 2 (b0) * 2 (k)
    assert len(plain) == len(ALL[2]) == 64
    # swapping the two elements pairs up structures; none is fixed
    # (the constant k moves), so there are exactly half as many orbits
    assert len(reduced) == 32


class TestValidation:
    def test_bound_needed(self):
        with pytest.raises(SpecificationError):
            Explorer(TransitionSystem(V, TRUE, TRUE), {})
        with pytest.raises(SpecificationError):
            Explorer(TransitionSystem(V, TRUE, TRUE), {"e": 0})

    def test_init_may_not_mention_post_state(self):
        with pytest.raises(SpecificationError):
            TransitionSystem(V, Rel("b0'"), TRUE)

    def test_free_variables(self):
        from l2sprophecy.syntax import Var
        with pytest.raises(SpecificationError):
            TransitionSystem(V, Rel("p0", (Var("X", "e"),)), TRUE)
