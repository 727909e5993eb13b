"""Prophecy witnesses, footprints, fair segments and the abstract-lasso
monitor expressed as a first-order transition system.

Monitor symbols (the invariant surface uses the same names):

``l2s_frozen``, ``l2s_saved``, ``l2s_stepped``
    0-ary flags: the freeze point is behind us, the shadow state is
    saved, at least one step was taken since saving.
``l2s_d.<sort>``
    elements named by constants so far (with footprint hooks applied).
``l2s_a.<sort>``
    the frozen projection domain.
``l2s_w1.<box>``, ``l2s_w2.<box>``
    fairness instances still pending before the freeze / since saving.
``l2s_s.<symbol>``
    shadow copy of a state symbol taken when saving.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .foltl import ClosureSet, canonical, canonical_vars, normalize, subformula_closure, subformulas
from .logic import SpecificationError, Structure, Vocabulary, check_formula, evaluate
from .parser import FormulaParser, _sort, frame_formula
from .sexpr import Atom, ParseError, SList, read_all, where
from .syntax import (
    And, App, Bool, Const, Eq, Eventually, Exists, Forall, Formula, Globally, Iff, Implies, Not, Or, Rel, Term, Var,
    children, conj, disj, exists, forall, neg, prime, prime_formula, substitute,
)
from .tableau import ProductSystem, TableauArtifacts, fo_translate, local_consistency, product_system
from .ts import TransitionSystem

Footprint = Dict[str, FrozenSet[int]]
Hooks = Mapping[str, str]


# ------------------------------------------------------------ prophecy

@dataclass(frozen=True)
class WitnessSpec:
    """Constants ``consts`` witnessing the canonical ``formula`` (over V1..Vk)."""

    formula: Formula
    consts: Tuple[str, ...]
    sorts: Tuple[str, ...]


@dataclass
class ProphecySpec:
    extra: List[Formula] = field(default_factory=list)
    witnesses: List[WitnessSpec] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.extra and not self.witnesses

    def witness_sorts(self) -> Dict[str, str]:
        return {c: s for w in self.witnesses for c, s in zip(w.consts, w.sorts)}

    def merged(self, other: "ProphecySpec") -> "ProphecySpec":
        extra = list(dict.fromkeys(list(self.extra) + list(other.extra)))
        ws = list(self.witnesses)
        for w in other.witnesses:
            if w not in ws:
                ws.append(w)
        return ProphecySpec(extra, ws)

    def closure(self, goal: Formula) -> ClosureSet:
        return subformula_closure([Not(goal)] + list(self.extra) + [w.formula for w in self.witnesses])

    def counts(self, goal: Formula) -> Tuple[int, int]:
        """(#A, #B): maximal prophecy roots outside sub(~goal), and witnessed formulas."""
        base = set(subformulas(normalize(Not(goal))))
        roots = [canonical(normalize(f))[0] for f in list(self.extra) + [w.formula for w in self.witnesses]]
        roots = [r for r in dict.fromkeys(roots) if r not in base]
        maximal = []
        for r in roots:
            if not any(r != o and r in subformulas(o) for o in roots):
                maximal.append(r)
        return len(maximal), len(self.witnesses)


def _witness_decl(x: SList, vocab: Vocabulary, source: str) -> WitnessSpec:
    """``(witness (c sort) for f)`` or ``(witness ((c1 s1) (c2 s2)) for f)``."""
    items = list(x[1:])
    if len(items) == 3 and isinstance(items[1], Atom) and str(items[1]) == "for":
        items = [items[0], items[2]]
    if len(items) != 2 or not isinstance(items[0], SList) or not items[0]:
        line, col = where(x)
        raise ParseError("expected (witness (c sort) for formula)", line, col, source)
    decl = items[0]
    groups = [decl] if isinstance(decl[0], Atom) else list(decl)
    consts = []
    for g in groups:
        if not isinstance(g, SList) or len(g) != 2:
            line, col = where(g)
            raise ParseError("malformed witness constant", line, col, source)
        name, sort = str(g[0]), str(g[1])
        if sort not in vocab.sorts:
            line, col = where(g)
            raise ParseError("unknown sort %r" % sort, line, col, source)
        if vocab.has(name):
            line, col = where(g)
            raise ParseError("witness constant %r clashes with a model symbol" % name, line, col, source)
        consts.append((name, sort))
    ext = vocab.extend(constants=consts)
    f = FormulaParser(ext, source=source, free_variables=False).top(items[1])
    try:
        return make_witness(f, dict(consts))
    except SpecificationError as e:
        line, col = where(x)
        raise ParseError(str(e), line, col, source)


def make_witness(f: Formula, consts: Mapping[str, str]) -> WitnessSpec:
    """Witness spec for ``f`` written over the witness constants ``consts`` (name -> sort)."""
    canon, args = canonical(normalize(f), dict(consts))
    names = tuple(a.name for a in args if isinstance(a, Const))
    if len(names) != len(args) or set(names) != set(consts):
        raise SpecificationError("witness formula must mention each witness constant and no free variables")
    return WitnessSpec(canon, names, tuple(consts[n] for n in names))


def parse_prophecy(text: str, vocab: Vocabulary, source: str = "<prophecy>") -> ProphecySpec:
    """``(prophecy f)`` adds a formula to the closure; ``(witness ...)`` declares witnesses."""
    spec = ProphecySpec()
    for x in read_all(text, source):
        if not isinstance(x, SList) or not x or not isinstance(x[0], Atom):
            line, col = where(x)
            raise ParseError("expected (prophecy ...) or (witness ...)", line, col, source)
        h = str(x[0])
        if h == "prophecy":
            for g in x[1:]:
                spec.extra.append(normalize(FormulaParser(vocab, source=source).top(g, close=False)))
        elif h == "witness":
            spec.witnesses.append(_witness_decl(x, vocab, source))
        else:
            line, col = where(x)
            raise ParseError("unknown prophecy form %r" % h, line, col, source)
    seen = set()
    for w in spec.witnesses:
        for c in w.consts:
            if c in seen:
                raise ParseError("witness constant %r declared twice" % c, 1, 1, source)
            seen.add(c)
    return spec


# ------------------------------------------------------- witness system

class WitnessSystem(TransitionSystem):
    """The product extended with frame-preserved witness constants."""

    def __init__(self, product: ProductSystem, t: TableauArtifacts, witnesses: Sequence[WitnessSpec],
                 consistency: bool = True):
        self.product = product
        self.artifacts = t
        self.witnesses = list(witnesses)
        self.consistency = consistency
        consts = [(c, s) for w in self.witnesses for c, s in zip(w.consts, w.sorts)]
        vocab = t.vocab.extend(constants=consts)
        axioms = []
        for w in self.witnesses:
            if w.formula not in t.closure:
                raise SpecificationError("witnessed formula %s is not in the closure" % (w.formula,))
            vs = canonical_vars(w.formula)
            body = fo_translate(w.formula, t)
            inst = substitute(body, {v: Const(c) for v, c in zip(vs, w.consts)})
            axioms.append(disj(neg(exists(vs, body)), inst))
        self.witness_axioms = conj(*axioms)
        init = conj(product.init, self.witness_axioms)
        trans = conj(product.trans, *(Eq(Const(prime(c)), Const(c)) for c, _ in consts))
        if consistency and t.boxes:
            lc = local_consistency(t)
            init = conj(init, lc)
            trans = conj(trans, prime_formula(lc, t.box_names() + vocab.dynamic_names()))
        super().__init__(vocab, init, trans, "%s+witnesses" % product.base.name)

    @property
    def witness_constants(self) -> List[str]:
        return [c for w in self.witnesses for c in w.consts]


def augment_with_witnesses(P: ProductSystem, t: TableauArtifacts, B: Sequence[WitnessSpec],
                           consistency: bool = True) -> WitnessSystem:
    return WitnessSystem(P, t, B, consistency)


def build_witness_system(S: TransitionSystem, goal: Formula, spec: ProphecySpec,
                         consistency: bool = True) -> WitnessSystem:
    A = spec.closure(goal)
    P, t = product_system(S, goal, A)
    return WitnessSystem(P, t, spec.witnesses, consistency)


# ------------------------------------------------------------ footprints

def footprint(s: Structure, hooks: Optional[Hooks] = None) -> Footprint:
    """Values of all constants, closed downward under the per-sort hook order."""
    v = s.vocab
    out: Dict[str, set] = {sort: set() for sort in v.sorts}
    for (n, sort), val in zip(v.constants, s.consts):
        out[sort].add(val)
    for sort, rel in (hooks or {}).items():
        order = s.rel(rel)
        top = out[sort]
        out[sort] = {x for x in range(s.sizes[sort]) if any((x, y) in order for y in top)} | top
    return {k: frozenset(x) for k, x in out.items()}


def union_footprint(a: Footprint, b: Footprint) -> Footprint:
    return {k: a.get(k, frozenset()) | b.get(k, frozenset()) for k in set(a) | set(b)}


def trace_footprint(pi: Sequence[Structure], i: int, hooks: Optional[Hooks] = None) -> Footprint:
    """Union of the footprints of states ``0..i``."""
    if not 0 <= i < len(pi):
        raise IndexError(i)
    acc = {sort: frozenset() for sort in pi[0].vocab.sorts}
    for j in range(i + 1):
        acc = union_footprint(acc, footprint(pi[j], hooks))
    return acc


def _assignments_over(vs: Sequence[Var], F: Footprint):
    for vals in itertools.product(*(sorted(F.get(v.sort, ())) for v in vs)):
        yield dict(zip(vs, vals))


def segment_fair(pi: Sequence[Structure], i: int, j: int, t: TableauArtifacts, F: Footprint) -> bool:
    """Every fairness instance with arguments in ``F`` holds somewhere in ``[i, j]``."""
    if not 0 <= i <= j < len(pi):
        raise IndexError((i, j))
    for b in t.boxes:
        for a in _assignments_over(b.vars, F):
            if not any(evaluate(pi[k], b.fair, a) for k in range(i, j + 1)):
                return False
    return True


def segment_evidence(pi: Sequence[Structure], i: int, j: int, t: TableauArtifacts,
                     F: Footprint) -> Dict[Tuple[str, Tuple[int, ...]], int]:
    """For each fairness instance over ``F``: the first index in ``[i, j]`` meeting it."""
    ev = {}
    for b in t.boxes:
        for a in _assignments_over(b.vars, F):
            for k in range(i, j + 1):
                if evaluate(pi[k], b.fair, a):
                    ev[(b.name, tuple(a[v] for v in b.vars))] = k
                    break
    return ev


# --------------------------------------------------------------- monitor

FLAGS = ("l2s_frozen", "l2s_saved", "l2s_stepped")


def d_name(sort: str) -> str:
    return "l2s_d." + sort


def a_name(sort: str) -> str:
    return "l2s_a." + sort


def w_name(phase: int, box: str) -> str:
    return "l2s_w%d.%s" % (phase, box)


def s_name(sym: str) -> str:
    return "l2s_s." + sym


class Monitor:
    """The monitored system: ``W`` run alongside the abstract-lasso detector."""

    def __init__(self, W: WitnessSystem, hooks: Optional[Hooks] = None):
        self.W = W
        self.t = W.artifacts
        self.hooks = dict(hooks or {})
        wv = W.vocab
        self.saved_symbols = [n for n in wv.symbol_names() if n not in wv.static]
        rels = [(f, ()) for f in FLAGS]
        rels += [(d_name(s), (s,)) for s in wv.sorts]
        rels += [(a_name(s), (s,)) for s in wv.sorts]
        for b in self.t.boxes:
            sorts = tuple(v.sort for v in b.vars)
            rels += [(w_name(1, b.name), sorts), (w_name(2, b.name), sorts)]
        funcs = []
        consts = []
        for n in self.saved_symbols:
            k = wv.kind(n)
            args, res = wv.signature(n)
            if k == "relation":
                rels.append((s_name(n), args))
            elif k == "function":
                funcs.append((s_name(n), args, res))
            else:
                consts.append((s_name(n), res))
        self.vocab = wv.extend(relations=rels, functions=funcs, constants=consts)
        self.error = self._error()
        self.system = TransitionSystem(self.vocab, self._init(), self._trans(), "%s+monitor" % W.name)

    # helpers ---------------------------------------------------------------
    def fp_formula(self, sort: str, x: Term, post: bool = False) -> Formula:
        wv = self.W.vocab
        cs = [Const(prime(n) if post and n not in wv.static else n) for n, s in wv.constants if s == sort]
        hook = self.hooks.get(sort)
        if hook:
            return disj(*(Rel(hook, (x, c)) for c in cs))
        return disj(*(Eq(x, c) for c in cs))

    def _x(self, sort: str) -> Var:
        return Var("X", sort)

    def _frame(self, names: Iterable[str]) -> Formula:
        return conj(*(frame_formula(self.vocab, n) for n in names))

    def _w_set(self, phase: int, rhs) -> Formula:
        parts = []
        for b in self.t.boxes:
            w = w_name(phase, b.name)
            parts.append(forall(b.vars, Iff(Rel(prime(w), b.vars), rhs(b))))
        return conj(*parts)

    def _in_domain(self, rel_of_sort, vs: Sequence[Var]) -> Formula:
        return conj(*(Rel(rel_of_sort(v.sort), (v,)) for v in vs))

    def _waits_done(self, phase: int) -> Formula:
        return conj(*(forall(b.vars, Implies(Rel(w_name(phase, b.name), b.vars), b.fair)) for b in self.t.boxes))

    # pieces ---------------------------------------------------------------
    def _init(self) -> Formula:
        wv = self.W.vocab
        parts = [self.W.init] + [neg(Rel(f)) for f in FLAGS]
        for s in wv.sorts:
            x = self._x(s)
            parts.append(forall((x,), Iff(Rel(d_name(s), (x,)), self.fp_formula(s, x))))
            parts.append(forall((x,), neg(Rel(a_name(s), (x,)))))
        for b in self.t.boxes:
            fp = conj(*(self.fp_formula(v.sort, v) for v in b.vars))
            parts.append(forall(b.vars, Iff(Rel(w_name(1, b.name), b.vars), fp)))
            parts.append(forall(b.vars, neg(Rel(w_name(2, b.name), b.vars))))
        parts.append(self._copy_saved(post=False))
        return conj(*parts)

    def _copy_saved(self, post: bool) -> Formula:
        """Shadow symbols equal the current state (primed shadow if ``post``)."""
        parts = []
        wv = self.W.vocab
        for n in self.saved_symbols:
            k = wv.kind(n)
            args, res = wv.signature(n)
            sn = prime(s_name(n)) if post else s_name(n)
            xs = tuple(Var("X%d" % (i + 1), s) for i, s in enumerate(args))
            if k == "constant":
                parts.append(Eq(Const(sn), Const(n)))
            elif k == "relation":
                parts.append(forall(xs, Iff(Rel(sn, xs), Rel(n, xs))))
            else:
                parts.append(forall(xs, Eq(App(sn, xs), App(n, xs))))
        return conj(*parts)

    def _trans(self) -> Formula:
        wv = self.W.vocab
        sorts = wv.sorts
        state = wv.dynamic_names()
        a_syms = [a_name(s) for s in sorts]
        d_syms = [d_name(s) for s in sorts]
        w1 = [w_name(1, b.name) for b in self.t.boxes]
        w2 = [w_name(2, b.name) for b in self.t.boxes]
        shadows = [s_name(n) for n in self.saved_symbols]
        fr, sv, st = (Rel(f) for f in FLAGS)

        step = [self.W.trans,
                Iff(Rel(prime("l2s_frozen")), fr), Iff(Rel(prime("l2s_saved")), sv),
                Iff(Rel(prime("l2s_stepped")), sv),
                self._frame(a_syms + shadows)]
        for s in sorts:
            x = self._x(s)
            step.append(forall((x,), Iff(Rel(prime(d_name(s)), (x,)),
                                         disj(Rel(d_name(s), (x,)), self.fp_formula(s, x, post=True)))))
        step.append(self._w_set(1, lambda b: conj(Rel(w_name(1, b.name), b.vars), neg(b.fair))))
        step.append(self._w_set(2, lambda b: conj(Rel(w_name(2, b.name), b.vars), neg(b.fair))))

        freeze = [neg(fr), self._waits_done(1), Rel(prime("l2s_frozen")),
                  Iff(Rel(prime("l2s_saved")), sv), Iff(Rel(prime("l2s_stepped")), st),
                  self._frame(state + d_syms + w1 + w2 + shadows)]
        for s in sorts:
            x = self._x(s)
            freeze.append(forall((x,), Iff(Rel(prime(a_name(s)), (x,)), Rel(d_name(s), (x,)))))

        save = [fr, neg(sv), Rel(prime("l2s_frozen")), Rel(prime("l2s_saved")), neg(Rel(prime("l2s_stepped"))),
                self._frame(state + a_syms + d_syms + w1), self._copy_saved(post=True),
                self._w_set(2, lambda b: self._in_domain(d_name, b.vars))]
        return disj(conj(*step), conj(*freeze), conj(*save))

    def equal_on_abstraction(self) -> Formula:
        """Current state and shadow agree on the projection to ``l2s_a``."""
        wv = self.W.vocab
        parts = []
        for n in self.saved_symbols:
            k = wv.kind(n)
            args, res = wv.signature(n)
            sn = s_name(n)
            xs = tuple(Var("X%d" % (i + 1), s) for i, s in enumerate(args))
            guard = self._in_domain(a_name, xs)
            if k == "constant":
                a = a_name(res)
                parts.append(Iff(Rel(a, (Const(n),)), Rel(a, (Const(sn),))))
                parts.append(Implies(Rel(a, (Const(n),)), Eq(Const(n), Const(sn))))
            elif k == "relation":
                parts.append(forall(xs, Implies(guard, Iff(Rel(n, xs), Rel(sn, xs)))))
            else:
                y = Var("Y", res)
                g = conj(guard, Rel(a_name(res), (y,)))
                parts.append(forall(xs + (y,), Implies(g, Iff(Eq(App(n, xs), y), Eq(App(sn, xs), y)))))
        return conj(*parts)

    def _error(self) -> Formula:
        return conj(Rel("l2s_saved"), Rel("l2s_stepped"), self._waits_done(2), self.equal_on_abstraction())


def build_monitor(W: WitnessSystem, t: TableauArtifacts = None, hooks: Optional[Hooks] = None) -> Monitor:
    if t is not None and t is not W.artifacts:
        raise SpecificationError("tableau does not belong to the witness system")
    return Monitor(W, hooks)


# ------------------------------------------------------------ invariants

@dataclass
class Conjecture:
    name: str
    source_formula: Formula        # as written (temporal, witness constants)
    formula: Optional[Formula] = None   # first-order over the monitor vocabulary


@dataclass
class InvariantFile:
    witnesses: List[WitnessSpec]
    conjectures: List[Conjecture]
    waits: Dict[str, Tuple[Tuple[Var, ...], Formula]]
    extra_prophecy: List[Formula] = field(default_factory=list)


def _monitor_specials(vocab: Vocabulary, waits: Dict[str, Tuple[Tuple[Var, ...], Formula]]):
    def l2s_set(prefix):
        def handler(p: FormulaParser, x: SList, env):
            if len(x) != 2:
                raise p.error("%s expects one argument" % x[0], x)
            t = p.term(x[1], env)
            return Rel(prefix + _sort(t, p.vocab), (t,))
        return handler

    def wait(p: FormulaParser, x: SList, env):
        # ($l2s_w (x...) f) or (($l2s_w (x...) f) t...)
        if isinstance(x[0], SList):
            inner, actuals = x[0], list(x[1:])
        else:
            inner, actuals = x, None
        if len(inner) != 3:
            raise p.error("expected ($l2s_w (x sort) formula)", inner)
        binder = inner[1]
        if isinstance(binder, SList) and binder and isinstance(binder[0], Atom) and len(binder) == 2 \
                and str(binder[1]) in p.vocab.sorts:
            vs, inner_env = p.binders(binder, env)
        elif isinstance(binder, SList):
            vs, inner_env = p.binders(binder, env) if binder else ((), dict(env))
        else:
            raise p.error("expected a binder list", binder)
        body = p.formula(inner[2], inner_env)
        key = "$l2s_w#%d" % len(waits)
        waits[key] = (vs, body)
        if actuals is None:
            args = tuple(vs)
        else:
            if len(actuals) != len(vs):
                raise p.error("$l2s_w applied to %d arguments, expects %d" % (len(actuals), len(vs)), x)
            args = tuple(p.term(a, env, v.sort) for a, v in zip(actuals, vs))
        return Rel(key, args)

    return {"l2s_a": l2s_set("l2s_a."), "l2s_d": l2s_set("l2s_d."), "$l2s_w": wait}


class _InvParser(FormulaParser):
    """Formula parser that also understands shadow-state terms ``($l2s_s f args...)``."""

    def term(self, x, env, expected=None):
        if isinstance(x, SList) and x and isinstance(x[0], Atom) and str(x[0]) == "$l2s_s":
            if len(x) < 2 or not isinstance(x[1], Atom):
                raise self.error("expected ($l2s_s symbol args...)", x)
            sym = str(x[1])
            if sym in self.vocab.const_index:
                if len(x) != 2:
                    raise self.error("constant %s takes no arguments" % sym, x)
                sort = self.vocab.const_sort(sym)
                if expected is not None and expected != sort:
                    raise self.sort_error("%s has sort %s, expected %s" % (sym, sort, expected), x)
                return Const(s_name(sym))
            if sym in self.vocab.func_index:
                args, res = self.vocab.signature(sym)
                if len(x) - 2 != len(args):
                    raise self.error("%s expects %d arguments" % (sym, len(args)), x)
                if expected is not None and expected != res:
                    raise self.sort_error("%s returns %s, expected %s" % (sym, res, expected), x)
                return App(s_name(sym), tuple(self.term(a, env, s) for a, s in zip(x[2:], args)))
            raise self.error("$l2s_s needs a constant or function symbol, got %r" % sym, x)
        return super().term(x, env, expected)

    def formula(self, x, env=None):
        env = {} if env is None else env
        if isinstance(x, SList) and len(x) >= 2 and isinstance(x[0], Atom) and str(x[0]) == "$l2s_s" \
                and isinstance(x[1], Atom) and str(x[1]) in self.vocab.rel_index:
            sym = str(x[1])
            args = self.vocab.signature(sym)[0]
            if len(x) - 2 != len(args):
                raise self.error("%s expects %d arguments" % (sym, len(args)), x)
            return Rel(s_name(sym), tuple(self.term(a, env, s) for a, s in zip(x[2:], args)))
        return super().formula(x, env)


def parse_invariant(text: str, vocab: Vocabulary, source: str = "<invariant>") -> InvariantFile:
    """Read ``(witness ...)``, ``(prophecy ...)`` and ``(conjecture name f)`` forms.

    Conjectures are parsed over the model vocabulary plus witness constants
    and the monitor flags; free variables are universally closed later.
    """
    forms = read_all(text, source)
    witnesses: List[WitnessSpec] = []
    extra: List[Formula] = []
    for x in forms:
        if isinstance(x, SList) and x and str(x[0]) == "witness":
            witnesses.append(_witness_decl(x, vocab, source))
    consts = [(c, s) for w in witnesses for c, s in zip(w.consts, w.sorts)]
    mv = vocab.extend(relations=[(f, ()) for f in FLAGS])
    mv = mv.extend(constants=consts)
    waits: Dict[str, Tuple[Tuple[Var, ...], Formula]] = {}
    conjs: List[Conjecture] = []
    p = _InvParser(mv, source=source, specials=_monitor_specials(mv, waits))
    for x in forms:
        if not isinstance(x, SList) or not x or not isinstance(x[0], Atom):
            line, col = where(x)
            raise ParseError("expected (conjecture name formula)", line, col, source)
        h = str(x[0])
        if h == "witness":
            continue
        if h == "prophecy":
            for g in x[1:]:
                extra.append(normalize(FormulaParser(vocab, source=source).top(g)))
            continue
        if h != "conjecture":
            line, col = where(x)
            raise ParseError("unknown invariant form %r" % h, line, col, source)
        if len(x) == 3 and isinstance(x[1], Atom):
            name, body = str(x[1]), x[2]
        elif len(x) == 2:
            name, body = "c%d" % (len(conjs) + 1), x[1]
        else:
            line, col = where(x)
            raise ParseError("expected (conjecture name formula)", line, col, source)
        p.free = {}
        conjs.append(Conjecture(name, p.top(body, close=True)))
    return InvariantFile(witnesses, conjs, waits, extra)


def _temporal_roots(f: Formula) -> List[Formula]:
    if isinstance(f, (Globally, Eventually)):
        return [f]
    out = []
    for c in children(f):
        out.extend(_temporal_roots(c))
    return out


def mine_prophecy(inv: InvariantFile, goal: Formula) -> ProphecySpec:
    """Temporal formulas used by the conjectures become prophecy formulas
    (witness constants abstracted to variables); declared witnesses are kept.

    A waiting relation ``($l2s_w (x) f)`` needs a box for ``[]~f``; it is
    added unless ``[]f`` is already available."""
    abstract = {c: s for w in inv.witnesses for c, s in zip(w.consts, w.sorts)}
    extra: List[Formula] = list(inv.extra_prophecy)
    for c in inv.conjectures:
        for r in _temporal_roots(c.source_formula):
            extra.append(canonical(normalize(r), abstract)[0])
    spec = ProphecySpec(list(dict.fromkeys(extra)), list(inv.witnesses))
    A = spec.closure(goal)
    for vs, body in inv.waits.values():
        if canonical(normalize(Globally(body)))[0] not in A:
            box = canonical(normalize(Globally(Not(body))), abstract)[0]
            if box not in spec.extra:
                spec.extra.append(box)
    return spec


def _wait_target(t: TableauArtifacts, vs, body, abstract):
    for g in (Globally(Not(body)), Globally(body)):
        box, args = canonical(normalize(g), abstract)
        name = t.boxmap.get(box)
        if name is not None:
            return name, args
    raise SpecificationError("$l2s_w refers to %s which has no fairness constraint" % (body,))


def resolve_invariant(inv: InvariantFile, mon: Monitor) -> List[Conjecture]:
    """Rewrite every conjecture into a first-order formula over the monitor vocabulary."""
    t = mon.t
    abstract = {c: s for w in inv.witnesses for c, s in zip(w.consts, w.sorts)}
    missing = set(abstract) - set(mon.W.witness_constants)
    if missing:
        raise SpecificationError("witness constants %s are not part of the system" % ", ".join(sorted(missing)))
    waits = {key: (vs,) + _wait_target(t, vs, body, abstract) for key, (vs, body) in inv.waits.items()}

    def sub_waits(f: Formula) -> Formula:
        if isinstance(f, Rel) and f.name in waits:
            vs, name, cargs = waits[f.name]
            actual = dict(zip(vs, f.args))
            args = tuple(actual.get(a, a) for a in cargs)
            sv = Rel("l2s_saved")
            return disj(conj(sv, Rel(w_name(2, name), args)), conj(neg(sv), Rel(w_name(1, name), args)))
        if isinstance(f, (Bool, Rel, Eq)):
            return f
        if isinstance(f, (Not, Globally, Eventually)):
            return type(f)(sub_waits(f.body))
        if isinstance(f, (Or, And)):
            return type(f)(tuple(sub_waits(a) for a in f.args))
        if isinstance(f, (Implies, Iff)):
            return type(f)(sub_waits(f.lhs), sub_waits(f.rhs))
        if isinstance(f, (Exists, Forall)):
            return type(f)(f.vars, sub_waits(f.body))
        raise TypeError(f)

    out = []
    for c in inv.conjectures:
        g = _fo_keep_shape(sub_waits(c.source_formula), t, abstract)
        check_formula(g, mon.vocab, allow_temporal=False)
        out.append(Conjecture(c.name, c.source_formula, g))
    return out


def _fo_keep_shape(f: Formula, t: TableauArtifacts, abstract) -> Formula:
    """Replace temporal subformulas by their tableau relations, leaving the
    first-order structure as written (so conjectures stay readable)."""
    if isinstance(f, (Globally, Eventually)):
        return fo_translate(f, t, abstract)
    if isinstance(f, (Bool, Rel, Eq)):
        return f
    if isinstance(f, Not):
        return Not(_fo_keep_shape(f.body, t, abstract))
    if isinstance(f, (Or, And)):
        return type(f)(tuple(_fo_keep_shape(a, t, abstract) for a in f.args))
    if isinstance(f, (Implies, Iff)):
        return type(f)(_fo_keep_shape(f.lhs, t, abstract), _fo_keep_shape(f.rhs, t, abstract))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.vars, _fo_keep_shape(f.body, t, abstract))
    raise TypeError(f)


# --------------------------------------------------------- abstract lasso

@dataclass
class AbstractLassoWitness:
    """A finite T_W trace with freeze index ``i``, save index ``j`` and
    repeat index ``k``; ``evidence`` records where each fairness instance
    was met in ``[0, i]`` and in ``[j, k]``."""

    trace: Tuple[Structure, ...]
    i: int
    j: int
    k: int
    fp0: Footprint
    fp_i: Footprint
    fp_j: Footprint
    evidence: Dict[str, Dict[Tuple[str, Tuple[int, ...]], int]] = field(default_factory=dict)

    def loop(self) -> Tuple[Structure, ...]:
        return self.trace[self.j:self.k + 1]
