"""Explicit-state search for abstract lassos.

The witness system is explored directly: base successors come from the
model's explorer, tableau labels follow the box rule (a true label
forces its body now and the label next; a false label with a true body
stays false; otherwise the next label is free).  Labels are chosen
inner box first so that locally inconsistent choices are cut early.

The detector runs on top in three phases::

    0  (s, d, w1)                   prefix; w1 = pending instances over fp(s0)
    1  (s, a, d)                    frozen; a = d at the freeze point
    2  (s, a, saved, w2, stepped)   saved; w2 = pending instances over d at save

Fairness instances are bits of an int.  Freeze and save are stutter
moves and do not count towards ``maxlen``.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .l2s import AbstractLassoWitness, Hooks, WitnessSystem, footprint, segment_evidence, union_footprint
from .logic import Compiler, SpecificationError, Structure, project, table_points
from .solver import Enumerator
from .syntax import prime_formula, symbols
from .ts import DomainBound, Explorer, ResourceLimit, _check_bound


class _Shim:
    __slots__ = ("consts", "rels", "funcs")

    def __init__(self, consts, rels, funcs):
        self.consts = consts
        self.rels = rels
        self.funcs = funcs


class WitnessSpace:
    """States and successors of a witness system at a fixed bound."""

    def __init__(self, W: WitnessSystem, bound: DomainBound, hooks: Optional[Hooks] = None):
        self.W = W
        self.t = W.artifacts
        self.vocab = v = W.vocab
        self.sizes = _check_bound(v, bound)
        self.hooks = dict(hooks or {})
        base = W.product.base
        self.base_vocab = bv = base.vocab
        self.base = Explorer(base, self.sizes)
        self.nconst = len(bv.constants)
        self.nrel = len(bv.relations)
        if [n for n, _ in v.constants[:self.nconst]] != [n for n, _ in bv.constants] or \
                [n for n, _ in v.relations[:self.nrel]] != [n for n, _ in bv.relations]:
            raise SpecificationError("unexpected witness-system vocabulary layout")
        self.boxes = list(self.t.boxes)
        names = [b.name for b in self.boxes]
        if [n for n, _ in v.relations[self.nrel:]] != names:
            raise SpecificationError("unexpected tableau relation layout")
        comp = Compiler(v, self.sizes)
        self.points = []
        self.body = []
        self.fair = []
        for b in self.boxes:
            slots = {x: i for i, x in enumerate(b.vars)}
            self.points.append(table_points([x.sort for x in b.vars], self.sizes))
            self.body.append(comp.compile(b.body, slots))
            self.fair.append(comp.compile(b.fair, slots))
        self.nslots = max(comp.nslots, 1)
        # inner boxes first: a box body mentions only boxes nested inside it
        deps = {b.name: {n for n in symbols(b.body) if n in names and n != b.name} for b in self.boxes}
        order: List[int] = []
        done = set()
        while len(order) < len(self.boxes):
            for i, b in enumerate(self.boxes):
                if i not in done and deps[b.name] <= {self.boxes[j].name for j in done}:
                    order.append(i)
                    done.add(i)
        self.order = order
        self.offsets = []
        n = 0
        for pts in self.points:
            self.offsets.append(n)
            n += len(pts)
        self.ninst = n
        self._succ: Dict[Structure, Tuple[Structure, ...]] = {}
        self._sat: Dict[Structure, int] = {}
        self._fp: Dict[Structure, Tuple[frozenset, ...]] = {}
        self._inst_over: Dict[Tuple[frozenset, ...], int] = {}
        self._proj: Dict[Tuple[Structure, Tuple[frozenset, ...]], object] = {}

    # -- states ---------------------------------------------------------------
    def _base_of(self, s: Structure) -> Structure:
        return Structure(self.base_vocab, self.sizes, s.consts[:self.nconst], s.rels[:self.nrel], s.funcs)

    def initial_states(self) -> List[Structure]:
        v = self.vocab
        unknown = [b.name for b in self.boxes] + self.W.witness_constants
        if not unknown:
            en = None
        else:
            en = Enumerator(v, self.sizes, prime_formula(self.W.init, unknown), unknown)
        check = Compiler(v, self.sizes)
        init = check.compile(self.W.init)
        env = [0] * max(check.nslots, 1)
        out = []
        wit = len(self.W.witness_constants)
        for b in self.base.initial_states():
            lifted = Structure(v, self.sizes, b.consts + (0,) * wit,
                               b.rels + (frozenset(),) * len(self.boxes), b.funcs)
            cands = [lifted] if en is None else en.solve(lifted)
            for s in cands:
                if init(s, None, env):
                    out.append(s)
        return list(dict.fromkeys(out))

    def successors(self, s: Structure) -> Tuple[Structure, ...]:
        r = self._succ.get(s)
        if r is None:
            r = tuple(self._successors(s))
            self._succ[s] = r
        return r

    def _successors(self, s: Structure) -> Iterator[Structure]:
        env = [0] * self.nslots
        labels = s.rels[self.nrel:]
        forced = []
        free = []
        for bi, pts in enumerate(self.points):
            lab = labels[bi]
            body = self.body[bi]
            ft, fr = [], []
            for p in pts:
                env[:len(p)] = p
                holds = body(s, None, env)
                if p in lab:
                    if not holds:
                        return
                    ft.append(p)
                elif not holds:
                    fr.append(p)
            forced.append(ft)
            free.append(fr)
        consistent = self.W.consistency
        wit = s.consts[self.nconst:]
        for b in self.base.successors(self._base_of(s)):
            rels = list(b.rels) + [frozenset()] * len(self.boxes)
            shim = _Shim(b.consts + wit, rels, b.funcs)
            for lab in self._choose(shim, 0, forced, free, consistent, env):
                yield Structure(self.vocab, self.sizes, shim.consts, b.rels + lab, b.funcs)

    def _choose(self, shim, pos, forced, free, consistent, env):
        if pos == len(self.order):
            yield tuple(shim.rels[self.nrel:])
            return
        bi = self.order[pos]
        body = self.body[bi]
        ok = True
        if consistent:
            for p in forced[bi]:
                env[:len(p)] = p
                if not body(shim, None, env):
                    ok = False
                    break
        if not ok:
            return
        options = []
        for p in free[bi]:
            if consistent:
                env[:len(p)] = p
                if not body(shim, None, env):
                    continue
            options.append(p)
        base = frozenset(forced[bi])
        slot = self.nrel + bi
        for r in range(len(options) + 1):
            for extra in itertools.combinations(options, r):
                shim.rels[slot] = base | frozenset(extra) if extra else base
                yield from self._choose(shim, pos + 1, forced, free, consistent, env)
        shim.rels[slot] = frozenset()

    # -- fairness / footprints ---------------------------------------------------
    def satisfied(self, s: Structure) -> int:
        m = self._sat.get(s)
        if m is None:
            m = 0
            env = [0] * self.nslots
            for bi, pts in enumerate(self.points):
                fair = self.fair[bi]
                off = self.offsets[bi]
                for k, p in enumerate(pts):
                    env[:len(p)] = p
                    if fair(s, None, env):
                        m |= 1 << (off + k)
            self._sat[s] = m
        return m

    def fp(self, s: Structure) -> Tuple[frozenset, ...]:
        r = self._fp.get(s)
        if r is None:
            f = footprint(s, self.hooks)
            r = tuple(f[x] for x in self.vocab.sorts)
            self._fp[s] = r
        return r

    def instances_over(self, d: Tuple[frozenset, ...]) -> int:
        m = self._inst_over.get(d)
        if m is None:
            by_sort = dict(zip(self.vocab.sorts, d))
            m = 0
            for bi, (b, pts) in enumerate(zip(self.boxes, self.points)):
                sorts = [x.sort for x in b.vars]
                for k, p in enumerate(pts):
                    if all(e in by_sort[srt] for e, srt in zip(p, sorts)):
                        m |= 1 << (self.offsets[bi] + k)
            self._inst_over[d] = m
        return m

    def projection(self, s: Structure, a: Tuple[frozenset, ...]):
        key = (s, a)
        r = self._proj.get(key)
        if r is None:
            r = project(s, dict(zip(self.vocab.sorts, a)))
            self._proj[key] = r
        return r

    def as_dict(self, d: Tuple[frozenset, ...]) -> Dict[str, frozenset]:
        return dict(zip(self.vocab.sorts, d))


def _union(d, e):
    return tuple(x | y for x, y in zip(d, e))


STEP, FREEZE, SAVE = "step", "freeze", "save"


@dataclass
class SearchStats:
    states: int = 0
    witness_states: int = 0
    depth: int = 0
    seconds: float = 0.0
    exhausted: bool = False     # the frontier ran dry before maxlen

    def as_dict(self):
        return dict(states=self.states, witness_states=self.witness_states, depth=self.depth,
                    seconds=round(self.seconds, 3), exhausted=self.exhausted)


@dataclass
class SearchOutcome:
    witness: Optional[AbstractLassoWitness]
    stats: SearchStats = field(default_factory=SearchStats)


class _Search:
    """Level-by-level BFS; stutter moves stay within a level, so every
    monitor state is first reached with the fewest real steps."""

    def __init__(self, space: WitnessSpace, node_budget: Optional[int] = None,
                 time_budget: Optional[float] = None):
        self.space = space
        self.node_budget = node_budget
        self.time_budget = time_budget

    def run(self, maxlen: int) -> SearchOutcome:
        if maxlen < 1:
            raise ValueError("maxlen must be at least 1")
        stats = SearchStats()
        self._t0 = time.monotonic()
        parent: Dict[tuple, Optional[Tuple[tuple, str]]] = {}
        level: List[tuple] = []
        for st in self._initial():
            if st not in parent:
                parent[st] = None
                level.append(st)
        depth = 1

        def finish(w):
            stats.states = len(parent)
            stats.seconds = time.monotonic() - self._t0
            stats.witness_states = self._explored()
            return SearchOutcome(w, stats)

        while level:
            stats.depth = depth
            i = 0
            while i < len(level):
                st = level[i]
                i += 1
                if self._is_error(st):
                    return finish(self._witness(st, parent))
                for nxt, move in self._stutter(st):
                    if nxt not in parent:
                        parent[nxt] = (st, move)
                        level.append(nxt)
                self._budget(parent)
            if depth >= maxlen:
                break
            nxt_level = []
            for st in level:
                for nxt in self._steps(st):
                    if nxt not in parent:
                        parent[nxt] = (st, STEP)
                        nxt_level.append(nxt)
                self._budget(parent)
            level = nxt_level
            depth += 1
        stats.exhausted = not level
        return finish(None)

    def _budget(self, parent):
        if self.node_budget is not None and len(parent) > self.node_budget:
            raise ResourceLimit("node budget of %d monitor states exhausted" % self.node_budget)
        if self.time_budget is not None and time.monotonic() - self._t0 > self.time_budget:
            raise ResourceLimit("time budget of %gs exhausted" % self.time_budget)

    @staticmethod
    def _chain(st, parent):
        chain = []
        cur = st
        while cur is not None:
            p = parent[cur]
            chain.append((cur, p[1] if p else None))
            cur = p[0] if p else None
        chain.reverse()
        return chain

    def _make_witness(self, trace, i, j, a) -> AbstractLassoWitness:
        sp = self.space
        k = len(trace) - 1
        fp0 = footprint(trace[0], sp.hooks)
        fp_j = fp0
        for x in range(1, j + 1):
            fp_j = union_footprint(fp_j, footprint(trace[x], sp.hooks))
        ev = {"prefix": segment_evidence(trace, 0, i, sp.t, fp0),
              "loop": segment_evidence(trace, j, k, sp.t, fp_j)}
        return AbstractLassoWitness(tuple(trace), i, j, k, fp0, sp.as_dict(a), fp_j, ev)


class LassoSearch(_Search):
    """Reference engine: one monitor state per labelled witness-system state."""

    def __init__(self, W: WitnessSystem, bound: DomainBound, hooks: Optional[Hooks] = None,
                 node_budget: Optional[int] = None, time_budget: Optional[float] = None):
        super().__init__(WitnessSpace(W, bound, hooks), node_budget, time_budget)

    def _explored(self):
        return len(self.space._succ)

    def _initial(self):
        sp = self.space
        for s in sp.initial_states():
            d = sp.fp(s)
            yield (0, s, d, sp.instances_over(d))

    def _steps(self, st):
        sp = self.space
        s = st[1]
        sat = sp.satisfied(s)
        if st[0] == 0:
            _, _, d, w1 = st
            w = w1 & ~sat
            for u in sp.successors(s):
                yield (0, u, _union(d, sp.fp(u)), w)
        elif st[0] == 1:
            _, _, a, d = st
            for u in sp.successors(s):
                yield (1, u, a, _union(d, sp.fp(u)))
        else:
            _, _, a, saved, w2, _ = st
            w = w2 & ~sat
            for u in sp.successors(s):
                yield (2, u, a, saved, w, True)

    def _stutter(self, st):
        sp = self.space
        if st[0] == 0:
            _, s, d, w1 = st
            if w1 & ~sp.satisfied(s) == 0:
                yield (1, s, d, d), FREEZE
        elif st[0] == 1:
            _, s, a, d = st
            yield (2, s, a, sp.projection(s, a), sp.instances_over(d), False), SAVE

    def _is_error(self, st) -> bool:
        if st[0] != 2:
            return False
        _, s, a, saved, w2, stepped = st
        sp = self.space
        return stepped and w2 & ~sp.satisfied(s) == 0 and sp.projection(s, a) == saved

    def _witness(self, st, parent) -> AbstractLassoWitness:
        trace = []
        i = j = None
        for node, move in self._chain(st, parent):
            if move in (None, STEP):
                trace.append(node[1])
            elif move == FREEZE:
                i = len(trace) - 1
            else:
                j = len(trace) - 1
        return self._make_witness(trace, i, j, st[2])


# ------------------------------------------------------------------ grouped

def _lkey(labels):
    return tuple(tuple(sorted(f)) for f in labels)


class GroupedSpace:
    """Boxes split into groups closed under nesting.  Given the base
    trace, the label runs of different groups are independent, so a
    monitor state can carry per group the *set* of reachable group
    configurations instead of one label vector."""

    def __init__(self, sp: WitnessSpace):
        self.sp = sp
        nb = len(sp.boxes)
        names = [b.name for b in sp.boxes]
        root = list(range(nb))

        def find(x):
            while root[x] != x:
                root[x] = root[root[x]]
                x = root[x]
            return x

        for i, b in enumerate(sp.boxes):
            for n in symbols(b.body):
                if n in names:
                    root[find(i)] = find(names.index(n))
        by_root: Dict[int, List[int]] = {}
        for i in range(nb):
            by_root.setdefault(find(i), []).append(i)
        self.groups = sorted((tuple(g) for g in by_root.values()), key=lambda g: g[0])
        self.gorder = [[i for i in sp.order if i in g] for g in self.groups]
        self.offsets = []
        for g in self.groups:
            off, n = {}, 0
            for i in g:
                off[i] = n
                n += len(sp.points[i])
            self.offsets.append(off)
        wv = sp.vocab
        self.core_vocab = wv.subset([n for n in wv.symbol_names() if n not in names])
        self.nrel = sp.nrel
        self.nb = nb
        self._core_succ: Dict[Structure, Tuple[Structure, ...]] = {}
        self._pre: Dict[tuple, object] = {}
        self._step: Dict[tuple, Tuple[tuple, ...]] = {}
        self._sat: Dict[tuple, int] = {}
        self._inst: Dict[tuple, int] = {}
        self._lproj: Dict[tuple, tuple] = {}
        self._fp: Dict[Structure, Tuple[frozenset, ...]] = {}
        self._cproj: Dict[tuple, object] = {}

    # -- core states -----------------------------------------------------------
    def core(self, s: Structure) -> Structure:
        return Structure(self.core_vocab, self.sp.sizes, s.consts, s.rels[:self.nrel], s.funcs)

    def split(self, s: Structure) -> Tuple[Structure, tuple]:
        labels = s.rels[self.nrel:]
        return self.core(s), tuple(tuple(labels[i] for i in g) for g in self.groups)

    def join(self, core: Structure, glabels: Sequence[tuple]) -> Structure:
        lab = [None] * self.nb
        for g, ls in zip(self.groups, glabels):
            for i, x in zip(g, ls):
                lab[i] = x
        return Structure(self.sp.vocab, self.sp.sizes, core.consts, core.rels + tuple(lab), core.funcs)

    def core_successors(self, c: Structure) -> Tuple[Structure, ...]:
        r = self._core_succ.get(c)
        if r is None:
            sp = self.sp
            wit = c.consts[sp.nconst:]
            base = Structure(sp.base_vocab, sp.sizes, c.consts[:sp.nconst], c.rels, c.funcs)
            r = tuple(Structure(self.core_vocab, sp.sizes, b.consts + wit, b.rels, b.funcs)
                      for b in sp.base.successors(base))
            self._core_succ[c] = r
        return r

    def _shim(self, c: Structure, gi: int, labels) -> _Shim:
        rels = list(c.rels) + [frozenset()] * self.nb
        for i, x in zip(self.groups[gi], labels):
            rels[self.nrel + i] = x
        return _Shim(c.consts, rels, c.funcs)

    def fp(self, c: Structure) -> Tuple[frozenset, ...]:
        r = self._fp.get(c)
        if r is None:
            f = footprint(c, self.sp.hooks)
            r = tuple(f[x] for x in self.sp.vocab.sorts)
            self._fp[c] = r
        return r

    def projection(self, c: Structure, a):
        key = (c, a)
        r = self._cproj.get(key)
        if r is None:
            r = project(c, dict(zip(self.sp.vocab.sorts, a)))
            self._cproj[key] = r
        return r

    # -- group operations -----------------------------------------------------------
    def _forced_free(self, gi: int, c: Structure, labels):
        key = (gi, c, labels)
        r = self._pre.get(key, 0)
        if r != 0:
            return r
        sp = self.sp
        shim = self._shim(c, gi, labels)
        env = [0] * sp.nslots
        forced, free = {}, {}
        r = None
        for i, lab in zip(self.groups[gi], labels):
            body = sp.body[i]
            ft, fr = [], []
            for p in sp.points[i]:
                env[:len(p)] = p
                holds = body(shim, None, env)
                if p in lab:
                    if not holds:
                        break
                    ft.append(p)
                elif not holds:
                    fr.append(p)
            else:
                forced[i], free[i] = ft, fr
                continue
            break
        else:
            r = (forced, free)
        self._pre[key] = r
        return r

    def step(self, gi: int, c: Structure, labels, c2: Structure) -> Tuple[tuple, ...]:
        """Group labels possible after moving from core ``c`` to ``c2``."""
        key = (gi, c, labels, c2)
        r = self._step.get(key)
        if r is not None:
            return r
        ff = self._forced_free(gi, c, labels)
        if ff is None:
            r = ()
        else:
            forced, free = ff
            shim = self._shim(c2, gi, [frozenset()] * len(self.groups[gi]))
            env = [0] * self.sp.nslots
            out = []
            self._choose(gi, shim, 0, forced, free, env, out)
            r = tuple(out)
        self._step[key] = r
        return r

    def _choose(self, gi, shim, pos, forced, free, env, out):
        order = self.gorder[gi]
        if pos == len(order):
            out.append(tuple(shim.rels[self.nrel + i] for i in self.groups[gi]))
            return
        sp = self.sp
        bi = order[pos]
        body = sp.body[bi]
        consistent = sp.W.consistency
        if consistent:
            for p in forced[bi]:
                env[:len(p)] = p
                if not body(shim, None, env):
                    return
        options = []
        for p in free[bi]:
            if consistent:
                env[:len(p)] = p
                if not body(shim, None, env):
                    continue
            options.append(p)
        base = frozenset(forced[bi])
        slot = self.nrel + bi
        for r in range(len(options) + 1):
            for extra in itertools.combinations(options, r):
                shim.rels[slot] = base | frozenset(extra) if extra else base
                self._choose(gi, shim, pos + 1, forced, free, env, out)
        shim.rels[slot] = frozenset()

    def satisfied(self, gi: int, c: Structure, labels) -> int:
        key = (gi, c, labels)
        m = self._sat.get(key)
        if m is None:
            sp = self.sp
            shim = self._shim(c, gi, labels)
            env = [0] * sp.nslots
            m = 0
            off = self.offsets[gi]
            for i in self.groups[gi]:
                fair = sp.fair[i]
                o = off[i]
                for k, p in enumerate(sp.points[i]):
                    env[:len(p)] = p
                    if fair(shim, None, env):
                        m |= 1 << (o + k)
            self._sat[key] = m
        return m

    def instances_over(self, gi: int, d) -> int:
        key = (gi, d)
        m = self._inst.get(key)
        if m is None:
            sp = self.sp
            by_sort = dict(zip(sp.vocab.sorts, d))
            m = 0
            off = self.offsets[gi]
            for i in self.groups[gi]:
                sorts = [x.sort for x in sp.boxes[i].vars]
                for k, p in enumerate(sp.points[i]):
                    if all(e in by_sort[srt] for e, srt in zip(p, sorts)):
                        m |= 1 << (off[i] + k)
            self._inst[key] = m
        return m

    def label_projection(self, gi: int, labels, a) -> tuple:
        key = (gi, labels, a)
        r = self._lproj.get(key)
        if r is None:
            sp = self.sp
            by_sort = dict(zip(sp.vocab.sorts, a))
            out = []
            for i, lab in zip(self.groups[gi], labels):
                sorts = [x.sort for x in sp.boxes[i].vars]
                out.append(frozenset(p for p in lab if all(e in by_sort[srt] for e, srt in zip(p, sorts))))
            r = tuple(out)
            self._lproj[key] = r
        return r


def _cubes(vectors: List[tuple], ng: int) -> List[List[List[tuple]]]:
    """Cover a set of per-group label vectors exactly by product sets."""
    vectors = sorted(set(vectors), key=lambda v: tuple(_lkey(x) for x in v))
    if not vectors:
        return []
    projs = [list(dict.fromkeys(v[g] for v in vectors)) for g in range(ng)]
    size = 1
    for p in projs:
        size *= len(p)
    if size == len(vectors):
        return [projs]
    for g in range(ng):
        if len(projs[g]) > 1:
            out = []
            for val in projs[g]:
                out.extend(_cubes([v for v in vectors if v[g] == val], ng))
            return out
    raise AssertionError("unreachable")


class GroupedLassoSearch(_Search):
    """Abstract-lasso search with per-group sets of label configurations.

    Monitor states::

        (0, core, d, G)                 G[g] = {(labels, w1)}
        (1, core, a, d, G)              G[g] = {labels}
        (2, core, a, saved, G, stepped) G[g] = {(labels, saved_labels, w2)}

    A state is an error when the core part repeats on ``a`` and every
    group has a configuration whose labels repeat and whose w2 is met.
    """

    def __init__(self, W: WitnessSystem, bound: DomainBound, hooks: Optional[Hooks] = None,
                 node_budget: Optional[int] = None, time_budget: Optional[float] = None):
        super().__init__(WitnessSpace(W, bound, hooks), node_budget, time_budget)
        self.gs = GroupedSpace(self.space)

    def _explored(self):
        return len(self.gs._core_succ)

    def _initial(self):
        gs = self.gs
        ng = len(gs.groups)
        by_core: Dict[Structure, List[tuple]] = {}
        for s in self.space.initial_states():
            c, gl = gs.split(s)
            by_core.setdefault(c, []).append(gl)
        for c, vecs in by_core.items():
            d = gs.fp(c)
            for cube in _cubes(vecs, ng):
                G = tuple(frozenset((lab, gs.instances_over(gi, d)) for lab in cube[gi]) for gi in range(ng))
                yield (0, c, d, G)

    def _steps(self, st):
        gs = self.gs
        ng = len(gs.groups)
        c = st[1]
        for c2 in gs.core_successors(c):
            G = st[3] if st[0] == 0 else st[4]
            newG = []
            for gi in range(ng):
                out = set()
                if st[0] == 0:
                    for lab, w in G[gi]:
                        post = gs.step(gi, c, lab, c2)
                        if post:
                            w2 = w & ~gs.satisfied(gi, c, lab)
                            out.update((l2, w2) for l2 in post)
                elif st[0] == 1:
                    for lab in G[gi]:
                        out.update(gs.step(gi, c, lab, c2))
                else:
                    for lab, slp, w in G[gi]:
                        post = gs.step(gi, c, lab, c2)
                        if post:
                            w2 = w & ~gs.satisfied(gi, c, lab)
                            out.update((l2, slp, w2) for l2 in post)
                if not out:
                    break
                newG.append(frozenset(out))
            else:
                newG = tuple(newG)
                if st[0] == 0:
                    yield (0, c2, _union(st[2], gs.fp(c2)), newG)
                elif st[0] == 1:
                    yield (1, c2, st[2], _union(st[3], gs.fp(c2)), newG)
                else:
                    yield (2, c2, st[2], st[3], newG, True)

    def _stutter(self, st):
        gs = self.gs
        c = st[1]
        if st[0] == 0:
            _, _, d, G = st
            F = []
            for gi, confs in enumerate(G):
                f = frozenset(lab for lab, w in confs if w & ~gs.satisfied(gi, c, lab) == 0)
                if not f:
                    return
                F.append(f)
            yield (1, c, d, d, tuple(F)), FREEZE
        elif st[0] == 1:
            _, _, a, d, G = st
            S = tuple(frozenset((lab, gs.label_projection(gi, lab, a), gs.instances_over(gi, d)) for lab in confs)
                      for gi, confs in enumerate(G))
            yield (2, c, a, gs.projection(c, a), S, False), SAVE

    def _good(self, gi, c, a, conf) -> bool:
        lab, slp, w = conf
        gs = self.gs
        return w & ~gs.satisfied(gi, c, lab) == 0 and gs.label_projection(gi, lab, a) == slp

    def _is_error(self, st) -> bool:
        if st[0] != 2:
            return False
        _, c, a, saved, G, stepped = st
        if not stepped or self.gs.projection(c, a) != saved:
            return False
        return all(any(self._good(gi, c, a, conf) for conf in confs) for gi, confs in enumerate(G))

    def _witness(self, st, parent) -> AbstractLassoWitness:
        gs = self.gs
        ng = len(gs.groups)
        chain = self._chain(st, parent)
        c, a = st[1], st[2]
        conf = [min((x for x in st[4][gi] if self._good(gi, c, a, x)), key=_ckey) for gi in range(ng)]
        labels_at = []          # (core, group labels) per monitor node, back to front
        i = j = None
        for idx in range(len(chain) - 1, -1, -1):
            node, move = chain[idx]
            labels_at.append((node, tuple(x if node[0] == 1 else x[0] for x in conf)))
            if move is None:
                break
            prev = chain[idx - 1][0]
            conf = [self._back(gi, prev, node, move, conf[gi]) for gi in range(ng)]
        labels_at.reverse()
        trace = []
        for (node, gl), (_, move) in zip(labels_at, chain):
            if move in (None, STEP):
                trace.append(gs.join(node[1], gl))
            elif move == FREEZE:
                i = len(trace) - 1
            else:
                j = len(trace) - 1
        return self._make_witness(trace, i, j, a)

    def _back(self, gi, prev, node, move, cur):
        """A configuration of ``prev`` that leads to ``cur`` in ``node``."""
        gs = self.gs
        c = prev[1]
        if move == FREEZE:
            return min((x for x in prev[3][gi] if x[0] == cur and x[1] & ~gs.satisfied(gi, c, x[0]) == 0), key=_ckey)
        if move == SAVE:
            return cur[0]
        G = prev[3] if prev[0] == 0 else prev[4]
        c2 = node[1]
        for x in sorted(G[gi], key=_ckey):
            lab = x if prev[0] == 1 else x[0]
            post = gs.step(gi, c, lab, c2)
            if prev[0] == 1:
                if cur in post:
                    return x
            elif cur[0] in post and (x[-1] & ~gs.satisfied(gi, c, lab)) == cur[-1] \
                    and (prev[0] == 0 or x[1] == cur[1]):
                return x
        raise AssertionError("no predecessor configuration")


def _ckey(conf):
    if conf and isinstance(conf[0], frozenset):
        return (_lkey(conf),)
    return tuple(_lkey(x) if isinstance(x, tuple) else x for x in conf)


ENGINES = {"grouped": GroupedLassoSearch, "flat": LassoSearch}


def search(W: WitnessSystem, bound: DomainBound, maxlen: int, hooks: Optional[Hooks] = None,
           node_budget: Optional[int] = None, time_budget: Optional[float] = None,
           engine: str = "grouped") -> SearchOutcome:
    return ENGINES[engine](W, bound, hooks, node_budget, time_budget).run(maxlen)
