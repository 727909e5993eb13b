"""First-order transition systems and explicit exploration at a fixed domain."""

from __future__ import annotations

from collections import deque
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from .logic import SpecificationError, Structure, Vocabulary, check_formula, evaluate, table_points
from .solver import Enumerator
from .syntax import Formula, free_vars, is_primed, prime_formula, symbols, unprime

DomainBound = Mapping[str, int]


class TransitionSystem:
    """``(vocab, init, trans)``; ``trans`` reads primed symbols as the post-state."""

    def __init__(self, vocab: Vocabulary, init: Formula, trans: Formula, name: str = "system"):
        self.vocab = vocab
        self.init = init
        self.trans = trans
        self.name = name
        if free_vars(init):
            raise SpecificationError("init has free variables: %s" % sorted(v.name for v in free_vars(init)))
        if free_vars(trans):
            raise SpecificationError("trans has free variables: %s" % sorted(v.name for v in free_vars(trans)))
        check_formula(init, vocab, allow_temporal=False)
        check_formula(trans, vocab, allow_temporal=False, allow_primed=True)
        if any(is_primed(s) for s in symbols(init)):
            raise SpecificationError("init mentions post-state symbols")
        for s in symbols(trans):
            if is_primed(s) and unprime(s) in vocab.interpreted:
                raise SpecificationError("interpreted symbol %r cannot change" % unprime(s))

    def __repr__(self) -> str:
        return "TransitionSystem(%s)" % self.name

    def explorer(self, bound: DomainBound, symmetry: bool = False) -> "Explorer":
        return Explorer(self, bound, symmetry)


def _check_bound(vocab: Vocabulary, bound: DomainBound) -> Dict[str, int]:
    b = {}
    for s in vocab.sorts:
        if s not in bound:
            raise SpecificationError("no bound for sort %r" % s)
        if bound[s] < 1:
            raise SpecificationError("bound for %r must be positive" % s)
        b[s] = int(bound[s])
    return b


def blank_structure(vocab: Vocabulary, sizes: Mapping[str, int]) -> Structure:
    """All-zero structure with interpreted symbols filled in."""
    return Structure.build(vocab, sizes, {n: 0 for n, _ in vocab.constants},
                           funcs={n: tuple([0] * len(table_points(a, sizes))) for n, a, _ in vocab.functions},
                           validate=False)


class Explorer:
    """Initial states and memoized successors of a system at a fixed bound."""

    def __init__(self, ts: TransitionSystem, bound: DomainBound, symmetry: bool = False):
        self.ts = ts
        self.sizes = _check_bound(ts.vocab, bound)
        self.symmetry = symmetry
        v = ts.vocab
        free = [n for n in v.symbol_names() if n not in v.interpreted]
        self._init_enum = Enumerator(v, self.sizes, prime_formula(ts.init, free), free)
        self._trans_enum = Enumerator(v, self.sizes, ts.trans, v.dynamic_names())
        self._succ: Dict[Structure, Tuple[Structure, ...]] = {}
        self._blank = blank_structure(v, self.sizes)

    def initial_states(self) -> List[Structure]:
        out = list(self._init_enum.solve(self._blank))
        if self.symmetry:
            out = _dedupe_iso(out)
        return out

    def successors(self, s: Structure) -> Tuple[Structure, ...]:
        r = self._succ.get(s)
        if r is None:
            r = tuple(self._trans_enum.solve(s))
            if self.symmetry:
                r = tuple(_dedupe_iso(list(r)))
            self._succ[s] = r
        return r

    def reachable(self, limit: Optional[int] = None) -> Tuple[List[Structure], Dict[Structure, Tuple[Structure, ...]]]:
        """BFS over reachable states; returns (states in BFS order, edges)."""
        order: List[Structure] = []
        seen = set()
        q = deque()
        for s in self.initial_states():
            if s not in seen:
                seen.add(s)
                order.append(s)
                q.append(s)
        if limit is not None and len(order) > limit:
            raise ResourceLimit("more than %d initial states" % limit)
        edges = {}
        while q:
            s = q.popleft()
            succ = self.successors(s)
            edges[s] = succ
            for t in succ:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    q.append(t)
                    if limit is not None and len(order) > limit:
                        raise ResourceLimit("more than %d reachable states" % limit)
        return order, edges


class ResourceLimit(Exception):
    """A node or time budget was exhausted."""


def initial_states(ts: TransitionSystem, bound: DomainBound) -> List[Structure]:
    return Explorer(ts, bound).initial_states()


def successors(ts: TransitionSystem, s: Structure) -> List[Structure]:
    out = list(Explorer(ts, s.sizes)._trans_enum.solve(s))
    for t in out:
        assert evaluate(s, ts.trans, post=t), "successor does not satisfy trans"
    return out


def bounded_traces(ts: TransitionSystem, bound: DomainBound, maxlen: int,
                   explorer: Optional[Explorer] = None) -> Iterator[Tuple[Structure, ...]]:
    """Every trace of length 1..maxlen, depth first, in a deterministic order."""
    if maxlen < 1:
        raise ValueError("maxlen must be at least 1")
    ex = explorer or Explorer(ts, bound)

    def go(prefix: Tuple[Structure, ...]):
        yield prefix
        if len(prefix) < maxlen:
            for t in ex.successors(prefix[-1]):
                yield from go(prefix + (t,))

    for s in ex.initial_states():
        yield from go((s,))


# ------------------------------------------------------------ symmetry

def _canonical_key(s: Structure):
    """Smallest encoding of ``s`` over all element permutations (tiny domains only)."""
    import itertools
    v = s.vocab
    sorts = [x for x in v.sorts if not any(x == (vocab_sort_of(v, n)) for n in v.interpreted)]
    perms_per_sort = [list(itertools.permutations(range(s.sizes[x]))) for x in sorts]
    best = None
    for combo in itertools.product(*perms_per_sort):
        pm = dict(zip(sorts, combo))
        key = _permuted_key(s, pm)
        if best is None or key < best:
            best = key
    return best


def vocab_sort_of(v: Vocabulary, name: str) -> str:
    args, res = v.signature(name)
    return res or args[0]


def _permuted_key(s: Structure, pm):
    v = s.vocab
    ident = lambda sort, e: pm[sort][e] if sort in pm else e
    consts = tuple(ident(sort, val) for (_, sort), val in zip(v.constants, s.consts))
    rels = tuple(tuple(sorted(tuple(ident(a, e) for a, e in zip(args, t)) for t in tuples))
                 for (_, args), tuples in zip(v.relations, s.rels))
    funcs = []
    for (n, args, res), table in zip(v.functions, s.funcs):
        pts = table_points(args, s.sizes)
        funcs.append(tuple(sorted((tuple(ident(a, e) for a, e in zip(args, p)), ident(res, val))
                                  for p, val in zip(pts, table))))
    return (consts, rels, tuple(funcs))


def _dedupe_iso(states: List[Structure]) -> List[Structure]:
    seen = set()
    out = []
    for s in states:
        k = _canonical_key(s)
        if k not in seen:
            seen.add(k)
            out.append(s)
    return out
