"""Tableau vocabulary, the FO(.) translation, product systems and a
fair-lasso oracle at a fixed finite domain."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .foltl import ClosureSet, LassoTrace, box_relation_name, canonical, canonical_vars, ltl_eval, normalize
from .logic import SpecificationError, Structure, Vocabulary, evaluate
from .syntax import (
    TRUE, Bool, Eq, Exists, Formula, Globally, Iff, Implies, Not, Or, Rel, Var, conj, disj, forall, neg,
)
from .ts import DomainBound, Explorer, TransitionSystem


class UnhousedSubformula(SpecificationError):
    """A temporal subformula has no fresh relation in the tableau."""


@dataclass(frozen=True)
class Box:
    formula: Globally          # canonical []psi
    name: str                  # fresh relation <psi>
    vars: Tuple[Var, ...]      # V1..Vk
    body: Formula              # FO(psi) over V1..Vk
    fair: Formula              # FO([]psi | ~psi) over V1..Vk

    @property
    def atom(self) -> Rel:
        return Rel(self.name, self.vars)


@dataclass
class TableauArtifacts:
    base: Vocabulary
    closure: ClosureSet
    vocab: Vocabulary
    boxes: List[Box]
    boxmap: Dict[Formula, str]
    abstract: Dict[str, str] = field(default_factory=dict)

    def box(self, name: str) -> Box:
        for b in self.boxes:
            if b.name == name:
                return b
        raise KeyError(name)

    @property
    def fairness(self) -> List[Tuple[Globally, Formula]]:
        return [(b.formula, b.fair) for b in self.boxes]

    def box_names(self) -> List[str]:
        return [b.name for b in self.boxes]


def make_tableau(base: Vocabulary, closure: ClosureSet) -> TableauArtifacts:
    """Extend ``base`` with one relation ``<psi>`` per ``[]psi`` in the closure."""
    boxmap: Dict[Formula, str] = {}
    rels = []
    for b in closure.boxes():
        name = box_relation_name(b)
        if base.has(name) or name in boxmap.values():
            raise SpecificationError("fresh relation name %r clashes" % name)
        boxmap[b] = name
        rels.append((name, tuple(v.sort for v in canonical_vars(b))))
    vocab = base.extend(relations=rels)
    t = TableauArtifacts(base, closure, vocab, [], boxmap)
    for b in closure.boxes():
        vs = canonical_vars(b)
        body = fo_translate(b.body, t)
        atom = Rel(boxmap[b], vs)
        t.boxes.append(Box(b, boxmap[b], vs, body, disj(atom, neg(body))))
    return t


def fo_translate(psi: Formula, t: TableauArtifacts, abstract: Optional[Mapping[str, str]] = None) -> Formula:
    """FO(psi): every ``[]phi(x)`` becomes ``<phi>(x)``; the rest is kept.

    ``abstract`` names constants (with sorts) that may stand in for free
    variables of a housed box, as witness constants do in invariants.
    """
    abstract = dict(abstract or {})

    def tr(g: Formula) -> Formula:
        if isinstance(g, (Bool, Rel, Eq)):
            return g
        if isinstance(g, Globally):
            c, args = canonical(g, abstract)
            name = t.boxmap.get(c)
            if name is None:
                raise UnhousedSubformula("temporal subformula %s is not in the closure" % (g,))
            return Rel(name, args)
        if isinstance(g, Not):
            return neg(tr(g.body))
        if isinstance(g, Or):
            return disj(*(tr(a) for a in g.args))
        if isinstance(g, Exists):
            return Exists(g.vars, tr(g.body))
        raise TypeError(g)

    return tr(normalize(psi))


def tableau_transition(t: TableauArtifacts) -> Formula:
    parts = []
    for b in t.boxes:
        parts.append(forall(b.vars, Iff(b.atom, conj(b.body, Rel(b.name + "'", b.vars)))))
    return conj(*parts)


def tableau_system(t: TableauArtifacts) -> TransitionSystem:
    return TransitionSystem(t.vocab, TRUE, tableau_transition(t), "tableau")


def local_consistency(t: TableauArtifacts) -> Formula:
    """``<phi>(x) -> FO(phi)(x)`` for every box: true in every state that has
    a tableau successor."""
    return conj(*(forall(b.vars, Implies(b.atom, b.body)) for b in t.boxes))


class ProductSystem(TransitionSystem):
    def __init__(self, base: TransitionSystem, goal: Formula, artifacts: TableauArtifacts):
        self.base = base
        self.goal = goal
        self.artifacts = artifacts
        self.negated_goal = fo_translate(Not(goal), artifacts)
        super().__init__(artifacts.vocab, conj(base.init, self.negated_goal),
                         conj(base.trans, tableau_transition(artifacts)), "%s*tableau" % base.name)


def product_system(S: TransitionSystem, goal: Formula, A: ClosureSet) -> Tuple[ProductSystem, TableauArtifacts]:
    if Not(goal) not in A:
        raise SpecificationError("the negated goal must belong to the closure")
    if not A.is_closed():
        raise SpecificationError("closure set is not closed under subformulas")
    t = make_tableau(S.vocab, A)
    return ProductSystem(S, goal, t), t


# ---------------------------------------------------------------- fairness

def _assignments(vs: Sequence[Var], sizes: Mapping[str, int]):
    for vals in itertools.product(*(range(sizes[v.sort]) for v in vs)):
        yield dict(zip(vs, vals))


def fairness_instances(t: TableauArtifacts, sizes: Mapping[str, int]) -> List[Tuple[Box, Dict[Var, int]]]:
    return [(b, a) for b in t.boxes for a in _assignments(b.vars, sizes)]


def is_fair_trace(pi: LassoTrace, t: TableauArtifacts) -> bool:
    """Every fairness instance holds somewhere in the loop."""
    if not t.vocab.is_subvocabulary_of(pi.loop[0].vocab):
        raise SpecificationError("trace vocabulary does not contain the tableau vocabulary")
    for b, a in fairness_instances(t, pi.sizes):
        if not any(evaluate(s, b.fair, a) for s in pi.loop):
            return False
    return True


def find_fair_lasso(P: TransitionSystem, t: TableauArtifacts, bound: DomainBound,
                    explorer: Optional[Explorer] = None) -> Optional[LassoTrace]:
    """A reachable cycle meeting every fairness instance, or None."""
    ex = explorer or Explorer(P, bound)
    order, edges = ex.reachable()
    if not order:
        return None
    index = {s: i for i, s in enumerate(order)}
    g = nx.DiGraph()
    g.add_nodes_from(range(len(order)))
    for s, succ in edges.items():
        for u in succ:
            g.add_edge(index[s], index[u])
    inst = fairness_instances(t, ex.sizes)
    sat = {}
    comps = sorted((sorted(c) for c in nx.strongly_connected_components(g)), key=lambda c: c[0])
    for comp in comps:
        cs = set(comp)
        if len(comp) == 1 and not g.has_edge(comp[0], comp[0]):
            continue
        targets = []
        ok = True
        for b, a in inst:
            hit = None
            for i in comp:
                key = (i, b.name, tuple(sorted((v.name, e) for v, e in a.items())))
                if key not in sat:
                    sat[key] = evaluate(order[i], b.fair, a)
                if sat[key]:
                    hit = i
                    break
            if hit is None:
                ok = False
                break
            targets.append(hit)
        if not ok:
            continue
        entry = comp[0]
        stem = _path(g, _init_ids(order, ex), entry, None)
        loop = [entry]
        cur = entry
        for tgt in dict.fromkeys(targets):
            if tgt == cur:
                continue
            loop.extend(_path(g, [cur], tgt, cs)[1:])
            cur = tgt
        loop.extend(_path(g, [cur], entry, cs, nonempty=True)[1:])
        loop = loop[:-1]
        states = [order[i] for i in stem[:-1]]
        return LassoTrace(tuple(states), tuple(order[i] for i in loop))
    return None


def _init_ids(order, ex) -> List[int]:
    inits = set(ex.initial_states())
    return [i for i, s in enumerate(order) if s in inits]


def _path(g, sources, target, within, nonempty=False) -> List[int]:
    """Shortest path from any source to target (at least one edge if ``nonempty``)."""
    parent = {}
    seeds = set()
    q = deque()
    if nonempty:
        src = sources[0]
        for u in g.successors(src):
            if (within is None or u in within) and u not in parent:
                parent[u] = src
                seeds.add(u)
                q.append(u)
    else:
        for src in sources:
            parent[src] = None
            q.append(src)
    while q:
        x = q.popleft()
        if x == target:
            path = [x]
            cur = x
            while True:
                p = parent[cur]
                if p is None:
                    break
                path.append(p)
                if cur in seeds:
                    break
                cur = p
            return list(reversed(path))
        for u in g.successors(x):
            if (within is None or u in within) and u not in parent:
                parent[u] = x
                q.append(u)
    raise AssertionError("no path")


def extend_to_fair(pi: LassoTrace, t: TableauArtifacts) -> LassoTrace:
    """Label every position with the boxes that hold there."""
    memo: dict = {}
    out = []
    for i, s in enumerate(pi.states):
        labels = {}
        for b in t.boxes:
            labels[b.name] = {tuple(a[v] for v in b.vars) for a in _assignments(b.vars, pi.sizes)
                              if ltl_eval(pi, i, b.formula, a, memo)}
        out.append(extend_structure(s, t.vocab, rels=labels))
    n = len(pi.stem)
    return LassoTrace(tuple(out[:n]), tuple(out[n:]))


def extend_structure(s: Structure, vocab: Vocabulary, consts: Mapping[str, int] = None,
                     rels: Mapping[str, Iterable[tuple]] = None) -> Structure:
    """Lift ``s`` to a larger vocabulary that only adds constants and relations."""
    consts = dict(consts or {})
    rels = dict(rels or {})
    c = []
    for n, _ in vocab.constants:
        c.append(s.const(n) if s.vocab.has(n) else consts[n])
    r = []
    for n, _ in vocab.relations:
        r.append(s.rel(n) if s.vocab.has(n) else frozenset(tuple(x) for x in rels[n]))
    f = tuple(s.funcs[s.vocab.func_index[n]] for n, _, _ in vocab.functions)
    return Structure(vocab, s.sizes, tuple(c), tuple(r), f)
