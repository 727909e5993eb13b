"""Reference procedures used by the tests.

They work on explicit state graphs and plain lasso enumeration, and do not
go through the tableau or the monitor.
"""

import random
from typing import Dict, Iterator, List, Sequence, Tuple

from l2sprophecy.foltl import LassoTrace
from l2sprophecy.logic import Structure, evaluate
from l2sprophecy.randgen import random_formula
from l2sprophecy.syntax import Formula, free_vars, is_temporal, children
from l2sprophecy.ts import Explorer, TransitionSystem


def state_graph(S: TransitionSystem, sizes) -> Tuple[List[Structure], List[Structure], Dict[Structure, tuple]]:
    ex = Explorer(S, sizes)
    order, edges = ex.reachable()
    return ex.initial_states(), order, edges


def stutter_free_lassos(inits, edges, max_stem: int, max_loop: int) -> Iterator[LassoTrace]:
    """Every lasso with at most ``max_stem`` stem states and ``max_loop`` loop
    states whose consecutive states differ (a loop of one state needs a self
    edge).  For formulas without a next operator this covers every lasso of
    the same length up to stuttering."""

    def loops_from(s):
        # cycles s -> ... -> s of length <= max_loop, no repeated neighbours
        if s in edges[s]:
            yield (s,)

        def go(path):
            last = path[-1]
            for u in edges[last]:
                if u == last:
                    continue
                if u == s:
                    if len(path) > 1:
                        yield tuple(path)
                elif len(path) < max_loop:
                    yield from go(path + [u])
        yield from go([s])

    def stems(prefix):
        yield prefix
        if len(prefix) < max_stem + 1:
            for u in edges[prefix[-1]]:
                if u != prefix[-1]:
                    yield from stems(prefix + (u,))

    cache = {}
    for s0 in inits:
        for path in stems((s0,)):
            head = path[-1]
            if head not in cache:
                cache[head] = list(loops_from(head))
            for loop in cache[head]:
                yield LassoTrace(path[:-1], loop)


def fo_parts(f: Formula) -> List[Formula]:
    """Maximal temporal-free subformulas."""
    if not is_temporal(f):
        return [f]
    out = []
    for c in children(f):
        out.extend(fo_parts(c))
    return out


def letter_key(pi: LassoTrace, parts: Sequence[Formula], bound_vars) -> tuple:
    """What a formula built from ``parts`` can see of ``pi``: for every state,
    the satisfying assignments of every part."""
    import itertools
    sizes = pi.sizes

    def letter(s):
        out = []
        for p in parts:
            vs = sorted(free_vars(p), key=lambda v: (v.name, v.sort))
            sat = []
            for vals in itertools.product(*(range(sizes[v.sort]) for v in vs)):
                sat.append(evaluate(s, p, dict(zip(vs, vals))))
            out.append(tuple(sat))
        return tuple(out)

    return tuple(letter(s) for s in pi.stem), tuple(letter(s) for s in pi.loop)


def goal_sample(vocab, n: int, seed: int = 2024, tdepth: int = 2) -> List[Formula]:
    """A fixed sample of ``n`` distinct closed goals with temporal depth <= ``tdepth``."""
    rng = random.Random(seed)
    out: List[Formula] = []
    while len(out) < n:
        g = random_formula(rng, vocab, tdepth, rng.randint(2, 5))
        if g not in out:
            out.append(g)
    return out
