"""Finite model enumeration for (two-vocabulary) formulas.

Given a pre-state and a formula whose primed symbols are unknown, list every
post-state satisfying it.  The formula is split at top-level disjunctions
and existentials into branches; inside a branch each conjunct is either

* *pointwise* for one unknown symbol -- the symbol occurs with a single
  argument tuple under a universal prefix (``forall x. r'(x) <-> x = t``,
  ``f'(t) = n``, ``c' = c``), which yields a set of allowed values per
  point that can be intersected before enumerating; or
* a *check*, evaluated as soon as all of its unknown symbols are assigned.

Symbols are enumerated one at a time from their candidate sets.
"""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .logic import Compiler, Structure, Vocabulary, table_points, table_strides
from .syntax import (
    And, App, Bool, Const, Eq, Exists, Forall, Formula, Or, Rel, Term, Var, children, is_primed, substitute,
    symbols, unprime,
)

MAX_BRANCHES = 512


class _Post:
    """Mutable post-state under construction (same layout as Structure)."""

    __slots__ = ("consts", "rels", "funcs")

    def __init__(self, pre: Structure):
        self.consts = list(pre.consts)
        self.rels = [set(r) for r in pre.rels]
        self.funcs = [list(f) for f in pre.funcs]


def _unknowns(f: Formula, unknown: FrozenSet[str]) -> FrozenSet[str]:
    return frozenset(unprime(s) for s in symbols(f) if is_primed(s) and unprime(s) in unknown)


# --------------------------------------------------------------- branching

def _branches(f: Formula, counter: List[int]) -> List[Tuple[Tuple[Var, ...], Tuple[Formula, ...]]]:
    if isinstance(f, Bool) and f.value:
        return [((), ())]
    if isinstance(f, Bool):
        return []
    if isinstance(f, And):
        acc: List[Tuple[Tuple[Var, ...], Tuple[Formula, ...]]] = [((), ())]
        for a in f.args:
            sub = _branches(a, counter)
            if len(acc) * len(sub) > MAX_BRANCHES:
                sub = [((), (a,))]
            acc = [(v1 + v2, c1 + c2) for v1, c1 in acc for v2, c2 in sub]
        return acc
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(_branches(a, counter))
        if len(out) > MAX_BRANCHES:
            return [((), (f,))]
        return out
    if isinstance(f, Exists):
        m = {}
        for v in f.vars:
            counter[0] += 1
            m[v] = Var("_e%d" % counter[0], v.sort)
        body = substitute(f.body, m)
        return [(tuple(m[v] for v in f.vars) + vs, cs) for vs, cs in _branches(body, counter)]
    return [((), (f,))]


# ---------------------------------------------------------- classification

def _occurrences(f: Formula, name: str, bound: FrozenSet[Var], out: List[Tuple[Tuple[Term, ...], FrozenSet[Var]]]):
    """Collect (args, inner-bound vars) for every occurrence of primed ``name``."""

    def in_term(t: Term):
        if isinstance(t, Const) and t.name == name:
            out.append(((), bound))
        elif isinstance(t, App):
            if t.func == name:
                out.append((t.args, bound))
            for a in t.args:
                in_term(a)

    if isinstance(f, Rel):
        if f.name == name:
            out.append((f.args, bound))
        for a in f.args:
            in_term(a)
        return
    if isinstance(f, Eq):
        in_term(f.lhs)
        in_term(f.rhs)
        return
    if isinstance(f, (Exists, Forall)):
        _occurrences(f.body, name, bound | frozenset(f.vars), out)
        return
    for c in children(f):
        _occurrences(c, name, bound, out)


def _term_vars(t: Term) -> Set[Var]:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, App):
        s: Set[Var] = set()
        for a in t.args:
            s |= _term_vars(a)
        return s
    return set()


def _term_syms(t: Term) -> Set[str]:
    if isinstance(t, Const):
        return {t.name}
    if isinstance(t, App):
        s = {t.func}
        for a in t.args:
            s |= _term_syms(a)
        return s
    return set()


class _Pointwise:
    __slots__ = ("symbol", "prefix", "args", "body")

    def __init__(self, symbol, prefix, args, body):
        self.symbol = symbol
        self.prefix = prefix
        self.args = args
        self.body = body


def _classify(c: Formula, unknown: FrozenSet[str]) -> Optional[_Pointwise]:
    us = _unknowns(c, unknown)
    if len(us) != 1:
        return None
    sym = next(iter(us))
    prefix: Tuple[Var, ...] = ()
    body = c
    while isinstance(body, Forall):
        prefix += body.vars
        body = body.body
    occ: List = []
    _occurrences(body, sym + "'", frozenset(), occ)
    if not occ:
        return None
    args = occ[0][0]
    for a, inner in occ:
        if a != args:
            return None
        for t in a:
            if _term_vars(t) & inner:
                return None
    for t in args:
        if any(is_primed(s) and unprime(s) in unknown for s in _term_syms(t)):
            return None
    return _Pointwise(sym, prefix, args, body)


# -------------------------------------------------------------- the engine

class _RelChoices:
    def __init__(self, pts, vals):
        self.pts = pts
        self.vals = vals

    def __iter__(self):
        pts = self.pts
        for combo in itertools.product(*self.vals):
            yield {p for p, b in zip(pts, combo) if b}


class _FuncChoices:
    def __init__(self, per_point):
        self.per_point = per_point

    def __iter__(self):
        for t in itertools.product(*self.per_point):
            yield list(t)


class _Branch:
    def __init__(self, params, pre_checks, symbol_order, pointwise, checks_after):
        self.params = params
        self.pre_checks = pre_checks
        self.symbol_order = symbol_order
        self.pointwise = pointwise
        self.checks_after = checks_after


class Enumerator:
    """Enumerate post-states ``t`` with ``(pre, t) |= formula``.

    ``unknown`` are the symbols whose primed copies are solved for; every
    other symbol of the post-state is copied from the pre-state.
    """

    def __init__(self, vocab: Vocabulary, sizes: Mapping[str, int], formula: Formula,
                 unknown: Sequence[str], order: Optional[Sequence[str]] = None):
        self.vocab = vocab
        self.sizes = dict(sizes)
        self.formula = formula
        self.unknown = tuple(unknown)
        uset = frozenset(unknown)
        for n in self.unknown:
            vocab.kind(n)
        rank = {n: i for i, n in enumerate(order or self.unknown)}
        self.compiler = Compiler(vocab, self.sizes)
        counter = [0]
        self.branches: List[_Branch] = []
        for params, conjuncts in _branches(formula, counter):
            slots = {v: i for i, v in enumerate(params)}
            pre_checks = []
            pw: Dict[str, list] = {}
            rest = []
            for c in conjuncts:
                us = _unknowns(c, uset)
                if not us:
                    pre_checks.append(self.compiler.compile(c, slots))
                    continue
                p = _classify(c, uset)
                if p is not None:
                    pw.setdefault(p.symbol, []).append(self._compile_pointwise(p, slots))
                else:
                    rest.append((c, us))
            order_syms = sorted(self.unknown, key=lambda n: (rank.get(n, len(rank)), n))
            pos = {n: i for i, n in enumerate(order_syms)}
            after: List[list] = [[] for _ in order_syms]
            for c, us in rest:
                last = max(pos[n] for n in us)
                after[last].append(self.compiler.compile(c, slots))
            self.branches.append(_Branch(params, pre_checks, order_syms, pw, after))
        self.nslots = self.compiler.nslots + 1

    def _compile_pointwise(self, p: _Pointwise, slots: Dict[Var, int]):
        inner = dict(slots)
        base = max(inner.values(), default=-1) + 1
        pslots = []
        for i, v in enumerate(p.prefix):
            inner[v] = base + i
            pslots.append(base + i)
        self.compiler.nslots = max(self.compiler.nslots, base + len(p.prefix))
        body = self.compiler.compile(p.body, inner)
        args = [self.compiler.compile_term(a, inner) for a in p.args]
        ranges = [range(self.sizes[v.sort]) for v in p.prefix]
        return (pslots, ranges, args, body)

    # ---------------------------------------------------------------------
    def solve(self, pre: Structure) -> Iterator[Structure]:
        seen: Set[Structure] = set()
        for br in self.branches:
            for s in self._solve_branch(br, pre):
                if s not in seen:
                    seen.add(s)
                    yield s

    def _solve_branch(self, br: _Branch, pre: Structure) -> Iterator[Structure]:
        env = [0] * max(self.nslots, 1)
        post = _Post(pre)
        for vals in itertools.product(*(range(self.sizes[p.sort]) for p in br.params)):
            for i, e in enumerate(vals):
                env[i] = e
            if not all(ch(pre, post, env) for ch in br.pre_checks):
                continue
            cands = []
            dead = False
            for name in br.symbol_order:
                c = self._candidates(name, br.pointwise.get(name, ()), pre, post, env)
                if c is None:
                    dead = True
                    break
                cands.append(c)
            if dead:
                continue
            yield from self._assign(br, 0, cands, pre, post, env)

    def _candidates(self, name: str, pws, pre, post: _Post, env) -> Optional[List[object]]:
        """All interpretations of ``name`` allowed by its pointwise constraints."""
        v = self.vocab
        kind = v.kind(name)
        args, res = v.signature(name)
        if kind == "relation":
            pts = table_points(args, self.sizes)
            vals = [(False, True)] * len(pts)
            idx = {p: i for i, p in enumerate(pts)}
            ri = v.rel_index[name]
            allowed: Dict[int, Set[bool]] = {}
            for pslots, ranges, argf, body in pws:
                for a in itertools.product(*ranges):
                    for s, e in zip(pslots, a):
                        env[s] = e
                    pt = tuple(f(pre, post, env) for f in argf)
                    ok = set()
                    for b in (False, True):
                        if b:
                            post.rels[ri].add(pt)
                        else:
                            post.rels[ri].discard(pt)
                        if body(pre, post, env):
                            ok.add(b)
                    k = idx[pt]
                    allowed[k] = allowed[k] & ok if k in allowed else ok
            vals = list(vals)
            for k, ok in allowed.items():
                if not ok:
                    return None
                vals[k] = tuple(b for b in (False, True) if b in ok)
            return _RelChoices(pts, vals)
        if kind == "constant":
            ci = v.const_index[name]
            rng = range(self.sizes[res])
            ok = set(rng)
            for pslots, ranges, argf, body in pws:
                for a in itertools.product(*ranges):
                    for s, e in zip(pslots, a):
                        env[s] = e
                    here = set()
                    for val in rng:
                        post.consts[ci] = val
                        if body(pre, post, env):
                            here.add(val)
                    ok &= here
                    if not ok:
                        return None
            return sorted(ok)
        fi = v.func_index[name]
        pts = table_points(args, self.sizes)
        strides = table_strides(args, self.sizes)
        rng = range(self.sizes[res])
        allowed_f: Dict[int, Set[int]] = {}
        for pslots, ranges, argf, body in pws:
            for a in itertools.product(*ranges):
                for s, e in zip(pslots, a):
                    env[s] = e
                k = sum(f(pre, post, env) * st for f, st in zip(argf, strides))
                here = set()
                for val in rng:
                    post.funcs[fi][k] = val
                    if body(pre, post, env):
                        here.add(val)
                allowed_f[k] = allowed_f[k] & here if k in allowed_f else here
                if not allowed_f[k]:
                    return None
        per_point = [sorted(allowed_f[k]) if k in allowed_f else list(rng) for k in range(len(pts))]
        return _FuncChoices(per_point)

    def _assign(self, br: _Branch, i: int, cands, pre, post: _Post, env) -> Iterator[Structure]:
        if i == len(br.symbol_order):
            yield self._freeze(post)
            return
        name = br.symbol_order[i]
        v = self.vocab
        kind = v.kind(name)
        checks = br.checks_after[i]
        for val in cands[i]:
            if kind == "relation":
                post.rels[v.rel_index[name]] = val
            elif kind == "constant":
                post.consts[v.const_index[name]] = val
            else:
                post.funcs[v.func_index[name]] = val
            if all(ch(pre, post, env) for ch in checks):
                yield from self._assign(br, i + 1, cands, pre, post, env)

    def _freeze(self, post: _Post) -> Structure:
        return Structure(self.vocab, self.sizes, tuple(post.consts), tuple(frozenset(r) for r in post.rels),
                         tuple(tuple(f) for f in post.funcs))
