"""FO-LTL: normalization, canonical forms, subformula closure and the
reference semantics over lasso-shaped traces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .logic import SpecificationError, Structure, evaluate
from .syntax import (
    And, App, Bool, Const, Eq, Eventually, Exists, Forall, Formula, Globally, Iff, Implies, Not, Or, Rel,
    Term, Var, children, disj, free_vars, is_temporal, neg, temporal_depth,
)


# ------------------------------------------------------------ normal form

def normalize(f: Formula) -> Formula:
    """Rewrite into the core connectives ``~, |, exists, [], atoms``.

    ``<>p`` becomes ``~[]~p``; ``&``, ``->``, ``<->`` and ``forall`` are
    expanded; double negations disappear; multi-variable binders are
    nested one variable at a time.
    """
    if isinstance(f, (Bool, Rel, Eq)):
        return f
    if isinstance(f, Not):
        return neg(normalize(f.body))
    if isinstance(f, Or):
        return disj(*(normalize(a) for a in f.args))
    if isinstance(f, And):
        return neg(disj(*(neg(normalize(a)) for a in f.args)))
    if isinstance(f, Implies):
        return disj(neg(normalize(f.lhs)), normalize(f.rhs))
    if isinstance(f, Iff):
        a, b = normalize(f.lhs), normalize(f.rhs)
        return disj(neg(disj(neg(a), neg(b))), neg(disj(a, b)))
    if isinstance(f, Exists):
        body = normalize(f.body)
        for v in reversed(f.vars):
            body = Exists((v,), body)
        return body
    if isinstance(f, Forall):
        body = neg(normalize(f.body))
        for v in reversed(f.vars):
            body = Exists((v,), body)
        return neg(body)
    if isinstance(f, Globally):
        return Globally(normalize(f.body))
    if isinstance(f, Eventually):
        return neg(Globally(neg(normalize(f.body))))
    raise TypeError(f)


def is_normal(f: Formula) -> bool:
    if isinstance(f, (And, Implies, Iff, Forall, Eventually)):
        return False
    if isinstance(f, Not) and isinstance(f.body, Not):
        return False
    if isinstance(f, Exists) and len(f.vars) != 1:
        return False
    return all(is_normal(c) for c in children(f))


# ------------------------------------------------------------ canonical form

def _canon_term(t: Term, env: Mapping, fresh: Dict, abstract: Mapping[str, str], order: List[Term]) -> Term:
    if isinstance(t, Var):
        if t in env:
            return env[t]
        if t not in fresh:
            fresh[t] = Var("V%d" % (len(fresh) + 1), t.sort)
            order.append(t)
        return fresh[t]
    if isinstance(t, Const):
        if t.name in abstract:
            if t not in fresh:
                fresh[t] = Var("V%d" % (len(fresh) + 1), abstract[t.name])
                order.append(t)
            return fresh[t]
        return t
    if isinstance(t, App):
        return App(t.func, tuple(_canon_term(a, env, fresh, abstract, order) for a in t.args))
    raise TypeError(t)


def canonical(f: Formula, abstract: Optional[Mapping[str, str]] = None) -> Tuple[Formula, Tuple[Term, ...]]:
    """Alpha-normalize ``f``.

    Free variables become ``V1..Vk`` by first occurrence and bound ones
    ``B1, B2, ...`` by binder depth.  Constants listed in ``abstract``
    (name -> sort) are treated like free variables.  Returns the canonical
    formula and the original terms standing for ``V1..Vk``.
    """
    abstract = abstract or {}
    fresh: Dict = {}
    order: List[Term] = []

    def walk(g: Formula, env: Dict, depth: int) -> Formula:
        if isinstance(g, Bool):
            return g
        if isinstance(g, Rel):
            return Rel(g.name, tuple(_canon_term(a, env, fresh, abstract, order) for a in g.args))
        if isinstance(g, Eq):
            return Eq(_canon_term(g.lhs, env, fresh, abstract, order), _canon_term(g.rhs, env, fresh, abstract, order))
        if isinstance(g, (Exists, Forall)):
            inner = dict(env)
            nv = []
            for v in g.vars:
                depth += 1
                b = Var("B%d" % depth, v.sort)
                inner[v] = b
                nv.append(b)
            return type(g)(tuple(nv), walk(g.body, inner, depth))
        if isinstance(g, (Not, Globally, Eventually)):
            return type(g)(walk(g.body, env, depth))
        if isinstance(g, (Or, And)):
            return type(g)(tuple(walk(a, env, depth) for a in g.args))
        if isinstance(g, (Implies, Iff)):
            return type(g)(walk(g.lhs, env, depth), walk(g.rhs, env, depth))
        raise TypeError(g)

    out = walk(f, {}, 0)
    return out, tuple(order)


def canonical_vars(f: Formula) -> Tuple[Var, ...]:
    """The ``V1..Vk`` variables of a canonical formula, in order."""
    vs = sorted(free_vars(f), key=lambda v: int(v.name[1:]))
    return tuple(vs)


# ------------------------------------------------------------------ closure

class ClosureSet:
    """An ordered, subformula-closed set of canonical normalized formulas."""

    def __init__(self, items: Iterable[Formula] = ()):
        self._items: Dict[Formula, None] = {}
        for f in items:
            self._items[f] = None

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, f: object) -> bool:
        if not isinstance(f, (Bool, Rel, Eq, Not, Or, And, Implies, Iff, Exists, Forall, Globally, Eventually)):
            return False
        return canonical(normalize(f))[0] in self._items

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ClosureSet) and set(self._items) == set(other._items)

    def __repr__(self) -> str:
        return "ClosureSet([%s])" % ", ".join(str(f) for f in self._items)

    def items(self) -> List[Formula]:
        return list(self._items)

    def boxes(self) -> List[Globally]:
        return [f for f in self._items if isinstance(f, Globally)]

    def is_closed(self) -> bool:
        return all(canonical(c)[0] in self._items for f in self._items for c in children(f))


def subformulas(f: Formula) -> List[Formula]:
    """sub(f) on a normalized formula, canonicalized, first occurrence order."""
    out: Dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        c = canonical(g)[0]
        if c in out:
            return
        out[c] = None
        for k in children(c):
            walk(k)

    walk(f)
    return list(out)


def subformula_closure(roots: Iterable[Formula]) -> ClosureSet:
    items: Dict[Formula, None] = {}
    for r in roots:
        for f in subformulas(normalize(r)):
            items[f] = None
    return ClosureSet(items)


def box_relation_name(box: Globally) -> str:
    """Name of the fresh relation standing for a canonical ``[]psi``."""
    return "<%s>" % (box.body,)


# ------------------------------------------------------------------ traces

@dataclass(frozen=True)
class LassoTrace:
    """Ultimately periodic trace ``stem . loop^omega``."""

    stem: Tuple[Structure, ...]
    loop: Tuple[Structure, ...]

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")
        sizes = self.loop[0].sizes
        for s in self.stem + self.loop:
            if s.sizes != sizes:
                raise ValueError("lasso states must share one domain")

    @property
    def states(self) -> Tuple[Structure, ...]:
        return self.stem + self.loop

    def __len__(self) -> int:
        return len(self.stem) + len(self.loop)

    def succ(self, i: int) -> int:
        return i + 1 if i + 1 < len(self) else len(self.stem)

    def future(self, i: int) -> range:
        """Positions visited from ``i`` onward (the whole loop recurs)."""
        return range(min(i, len(self.stem)), len(self))

    @property
    def sizes(self):
        return self.loop[0].sizes

    def unroll(self, n: int) -> List[Structure]:
        out = []
        i = 0
        for _ in range(n):
            out.append(self.states[i])
            i = self.succ(i)
        return out


def _assignments(vs: Sequence[Var], sizes: Mapping[str, int]):
    for vals in itertools.product(*(range(sizes[v.sort]) for v in vs)):
        yield dict(zip(vs, vals))


def ltl_eval(pi: LassoTrace, i: int, psi: Formula, sigma: Optional[Mapping[Var, int]] = None,
             memo: Optional[dict] = None) -> bool:
    """Truth of ``psi`` at position ``i`` of the lasso ``pi``.

    Temporal operators quantify over ``pi.future(i)``: inside the loop the
    whole loop recurs, stem positions look ahead through the rest of the
    stem and the loop.
    """
    if not 0 <= i < len(pi):
        raise IndexError(i)
    memo = {} if memo is None else memo
    sizes = pi.sizes
    states = pi.states

    def ev(j: int, g: Formula, env: Dict[Var, int]) -> bool:
        if not is_temporal(g):
            return evaluate(states[j], g, env)
        key = (j, g, tuple(sorted(((v.name, v.sort, env[v]) for v in free_vars(g)))))
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(g, Globally):
            r = all(ev(k, g.body, env) for k in pi.future(j))
        elif isinstance(g, Eventually):
            r = any(ev(k, g.body, env) for k in pi.future(j))
        elif isinstance(g, Not):
            r = not ev(j, g.body, env)
        elif isinstance(g, Or):
            r = any(ev(j, a, env) for a in g.args)
        elif isinstance(g, And):
            r = all(ev(j, a, env) for a in g.args)
        elif isinstance(g, Implies):
            r = (not ev(j, g.lhs, env)) or ev(j, g.rhs, env)
        elif isinstance(g, Iff):
            r = ev(j, g.lhs, env) == ev(j, g.rhs, env)
        elif isinstance(g, (Exists, Forall)):
            want = isinstance(g, Exists)
            r = not want
            for a in _assignments(g.vars, sizes):
                inner = dict(env)
                inner.update(a)
                if ev(j, g.body, inner) == want:
                    r = want
                    break
        else:
            raise TypeError(g)
        memo[key] = r
        return r

    env = dict(sigma or {})
    missing = [v for v in free_vars(psi) if v not in env]
    if missing:
        raise SpecificationError("unbound variable %s" % missing[0].name)
    return ev(i, psi, env)


def naive_ltl_eval(pi: LassoTrace, i: int, psi: Formula, sigma: Optional[Mapping[Var, int]] = None) -> bool:
    """Reference semantics by plain unrolling.

    The lasso is unrolled to ``|stem| + 2*|loop|*(depth+1)`` states.  A
    temporal operator at unrolled position ``j`` inspects the window
    ``[j, max(j, |stem|) + |loop|)``, which already contains every state the
    trace visits from ``j`` on.  Each nesting level pushes the window at most
    one period further, so the unrolling is long enough for positions in the
    first period.
    """
    depth = temporal_depth(psi)
    n = len(pi.stem) + 2 * len(pi.loop) * (depth + 1)
    seq = pi.unroll(n)
    sizes = pi.sizes

    stem, loop = len(pi.stem), len(pi.loop)

    def window(j: int) -> range:
        end = max(j, stem) + loop
        if end > n:
            raise AssertionError("unrolling too short")
        return range(j, end)

    def ev(j: int, g: Formula, env: Dict[Var, int]) -> bool:
        if isinstance(g, Globally):
            return all(ev(k, g.body, env) for k in window(j))
        if isinstance(g, Eventually):
            return any(ev(k, g.body, env) for k in window(j))
        if isinstance(g, (Bool, Rel, Eq)):
            return evaluate(seq[j], g, env)
        if isinstance(g, Not):
            return not ev(j, g.body, env)
        if isinstance(g, Or):
            return any(ev(j, a, env) for a in g.args)
        if isinstance(g, And):
            return all(ev(j, a, env) for a in g.args)
        if isinstance(g, Implies):
            return (not ev(j, g.lhs, env)) or ev(j, g.rhs, env)
        if isinstance(g, Iff):
            return ev(j, g.lhs, env) == ev(j, g.rhs, env)
        if isinstance(g, (Exists, Forall)):
            res = [ev(j, g.body, {**env, **a}) for a in _assignments(g.vars, sizes)]
            return any(res) if isinstance(g, Exists) else all(res)
        raise TypeError(g)

    return ev(i, psi, dict(sigma or {}))
