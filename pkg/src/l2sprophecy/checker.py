"""Back-ends: bounded abstract-lasso search, inductive invariant checking,
VC export and the closure harness.

Verdicts are strings so they print and compare easily:
``lasso-found``, ``no-lasso-within-bound``, ``invariant-holds``, ``cti``
and ``inconclusive`` (a budget ran out; never a verdict about the model).
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .explicit import SearchStats, search
from .foltl import normalize
from .l2s import (
    AbstractLassoWitness, Conjecture, Hooks, Monitor, ProphecySpec, WitnessSpec, WitnessSystem,
    build_witness_system,
)
from .logic import Structure, Vocabulary, evaluate
from .smt import script
from .solver import Enumerator
from .syntax import (
    And, Const, Forall, Formula, Implies, Not, Rel, Var, conj, neg, prime_formula,
)
from .ts import DomainBound, Explorer, ResourceLimit, TransitionSystem, _check_bound, blank_structure

LASSO = "lasso-found"
NO_LASSO = "no-lasso-within-bound"
HOLDS = "invariant-holds"
CTI = "cti"
INCONCLUSIVE = "inconclusive"


class InvalidWitness(AssertionError):
    """The search produced a lasso that the validator rejects (a bug)."""


@dataclass
class Cti:
    """A structure (or step) falsifying one verification condition."""

    vc: str                                  # init | consecution | safety
    state: Structure
    post: Optional[Structure] = None
    conjecture: Optional[str] = None         # None for the safety VC
    path: Tuple[str, ...] = ()

    def describe(self) -> str:
        what = "error condition" if self.conjecture is None else "conjecture %s" % self.conjecture
        at = " at " + " / ".join(self.path) if self.path else ""
        return "%s VC fails on %s%s" % (self.vc, what, at)


@dataclass
class CheckResult:
    verdict: str
    witness: Optional[AbstractLassoWitness] = None
    cti: Optional[Cti] = None
    bound: Dict[str, int] = field(default_factory=dict)
    maxlen: Optional[int] = None
    stats: Optional[SearchStats] = None
    checked: int = 0
    reason: str = ""

    @property
    def exit_code(self) -> int:
        return {LASSO: 1, CTI: 1, INCONCLUSIVE: 2}.get(self.verdict, 0)


# ------------------------------------------------------------- validator
#
# Written against the definitions only; it does not reuse the footprint,
# fair-segment or projection helpers the search relies on.

def _ref_footprint(s: Structure, hooks: Optional[Hooks]) -> Dict[str, frozenset]:
    v = s.vocab
    out = {}
    for sort in v.sorts:
        named = {s.const(n) for n, cs in v.constants if cs == sort}
        hook = (hooks or {}).get(sort)
        if hook:
            x = Var("E", sort)
            cs = [Const(n) for n, cs in v.constants if cs == sort]
            named |= {e for e in range(s.sizes[sort])
                      if any(evaluate(s, Rel(hook, (x, c)), {x: e}) for c in cs)}
        out[sort] = frozenset(named)
    return out


def _ref_union(trace: Sequence[Structure], upto: int, hooks) -> Dict[str, frozenset]:
    acc: Dict[str, frozenset] = {}
    for s in trace[:upto + 1]:
        for k, x in _ref_footprint(s, hooks).items():
            acc[k] = acc.get(k, frozenset()) | x
    return acc


def _ref_fair(trace, lo, hi, boxes, F) -> List[str]:
    missing = []
    for b in boxes:
        for vals in itertools.product(*(sorted(F[v.sort]) for v in b.vars)):
            sigma = dict(zip(b.vars, vals))
            if not any(evaluate(trace[k], b.fair, sigma) for k in range(lo, hi + 1)):
                missing.append("%s%s" % (b.name, vals))
    return missing


def _ref_proj_diff(s: Structure, t: Structure, D: Mapping[str, frozenset], names: Sequence[str]) -> List[str]:
    v = s.vocab
    diff = []
    for n in names:
        kind = v.kind(n)
        args, res = v.signature(n)
        if kind == "constant":
            a, b = s.const(n), t.const(n)
            da, db = a in D[res], b in D[res]
            if da != db or (da and a != b):
                diff.append(n)
            continue
        pts = itertools.product(*(sorted(D[x]) for x in args))
        for p in pts:
            if kind == "relation":
                if (p in s.rel(n)) != (p in t.rel(n)):
                    diff.append("%s%s" % (n, p))
                    break
            else:
                a, b = s.func(n, p), t.func(n, p)
                if (a in D[res] or b in D[res]) and a != b:
                    diff.append("%s%s" % (n, p))
                    break
    return diff


def validate_witness(w: AbstractLassoWitness, W: WitnessSystem, hooks: Optional[Hooks] = None) -> List[str]:
    """Problems with ``w`` as an abstract lasso of ``W`` (empty list = valid)."""
    problems = []
    tr = w.trace
    if not (0 <= w.i <= w.j < w.k <= len(tr) - 1):
        return ["indices violate 0 <= i <= j < k < n: %d %d %d (n=%d)" % (w.i, w.j, w.k, len(tr))]
    if not evaluate(tr[0], W.init):
        problems.append("state 0 is not initial")
    for x in range(len(tr) - 1):
        if not evaluate(tr[x], W.trans, post=tr[x + 1]):
            problems.append("step %d -> %d is not a transition" % (x, x + 1))
    boxes = W.artifacts.boxes
    fp0 = _ref_footprint(tr[0], hooks)
    for m in _ref_fair(tr, 0, w.i, boxes, fp0):
        problems.append("prefix [0,%d] misses fairness instance %s" % (w.i, m))
    Fj = _ref_union(tr, w.j, hooks)
    for m in _ref_fair(tr, w.j, w.k, boxes, Fj):
        problems.append("loop [%d,%d] misses fairness instance %s" % (w.j, w.k, m))
    Fi = _ref_union(tr, w.i, hooks)
    if {k: frozenset(x) for k, x in w.fp_i.items()} != Fi:
        problems.append("recorded freeze footprint differs from f(pi, i)")
    names = [n for n in W.vocab.symbol_names() if n not in W.vocab.static]
    for d in _ref_proj_diff(tr[w.j], tr[w.k], Fi, names):
        problems.append("states %d and %d differ on %s inside the frozen footprint" % (w.j, w.k, d))
    return problems


# ----------------------------------------------------------------- search

def search_abstract_lasso(W: WitnessSystem, bound: DomainBound, maxlen: int, hooks: Optional[Hooks] = None,
                          node_budget: Optional[int] = None, time_budget: Optional[float] = None,
                          engine: str = "grouped") -> CheckResult:
    """Breadth-first search for an abstract lasso; witnesses are re-validated."""
    sizes = _check_bound(W.vocab, bound)
    try:
        out = search(W, sizes, maxlen, hooks, node_budget, time_budget, engine)
    except ResourceLimit as e:
        return CheckResult(INCONCLUSIVE, bound=sizes, maxlen=maxlen, reason=str(e))
    if out.witness is None:
        return CheckResult(NO_LASSO, bound=sizes, maxlen=maxlen, stats=out.stats)
    bad = validate_witness(out.witness, W, hooks)
    if bad:
        raise InvalidWitness("; ".join(bad))
    return CheckResult(LASSO, witness=out.witness, bound=sizes, maxlen=maxlen, stats=out.stats)


def check_property(S: TransitionSystem, goal: Formula, spec: Optional[ProphecySpec], bound: DomainBound,
                   maxlen: int, hooks: Optional[Hooks] = None, **kw) -> CheckResult:
    W = build_witness_system(S, goal, spec or ProphecySpec())
    return search_abstract_lasso(W, bound, maxlen, hooks, **kw)


def monitor_error_trace(mon: Monitor, bound: DomainBound, limit: Optional[int] = None) -> Optional[List[Structure]]:
    """Exhaustive BFS of the formula-level monitor; a path to an error
    state, or None.  Slow; meant for cross-checking on tiny instances."""
    ex = Explorer(mon.system, bound)
    parent: Dict[Structure, Optional[Structure]] = {}
    q = deque()
    for s in ex.initial_states():
        if s not in parent:
            parent[s] = None
            q.append(s)
    while q:
        s = q.popleft()
        if evaluate(s, mon.error):
            path = [s]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for t in ex.successors(s):
            if t not in parent:
                parent[t] = s
                q.append(t)
                if limit is not None and len(parent) > limit:
                    raise ResourceLimit("more than %d monitor states" % limit)
    return None


# ------------------------------------------------------------- invariants

def _false_path(s: Structure, f: Formula, sigma=None, post=None) -> Tuple[str, ...]:
    """Where a false formula fails: conjunct indices, falsifying instances
    of universals and right-hand sides of implications."""
    sigma = dict(sigma or {})
    if isinstance(f, And):
        for i, a in enumerate(f.args):
            if not evaluate(s, a, sigma, post):
                return ("and[%d]" % i,) + _false_path(s, a, sigma, post)
    if isinstance(f, Forall):
        for vals in itertools.product(*(range(s.sizes[v.sort]) for v in f.vars)):
            env = dict(sigma)
            env.update(zip(f.vars, vals))
            if not evaluate(s, f.body, env, post):
                here = ",".join("%s=%s%d" % (v.name, v.sort, e) for v, e in zip(f.vars, vals))
                return ("forall " + here,) + _false_path(s, f.body, env, post)
    if isinstance(f, Implies) and evaluate(s, f.lhs, sigma, post):
        return ("rhs",) + _false_path(s, f.rhs, sigma, post)
    return ()


def _size_vectors(sizes: Mapping[str, int], upto: bool) -> Iterator[Dict[str, int]]:
    names = sorted(sizes)
    ranges = [range(1, sizes[n] + 1) if upto else (sizes[n],) for n in names]
    for combo in itertools.product(*ranges):
        yield dict(zip(names, combo))


def invariant_states(vocab: Vocabulary, inv: Formula, sizes: Mapping[str, int]) -> Iterator[Structure]:
    """Every structure of the given sizes satisfying ``inv``."""
    free = [n for n in vocab.symbol_names() if n not in vocab.interpreted]
    enum = Enumerator(vocab, sizes, prime_formula(inv, free), free)
    return enum.solve(blank_structure(vocab, sizes))


def check_inductive_invariant(mon: Monitor, conjectures: Sequence[Conjecture], bound: DomainBound,
                              upto: bool = True, node_budget: Optional[int] = None) -> CheckResult:
    """Check init => inv, inv & trans => inv' and inv => ~error by enumeration.

    With ``upto`` every domain size from 1 to the bound is tried; the
    consecution VC only looks at successors of states satisfying inv."""
    sizes = _check_bound(mon.vocab, bound)
    inv = conj(*(c.formula for c in conjectures))
    n = 0

    def tick():
        nonlocal n
        n += 1
        if node_budget is not None and n > node_budget:
            raise ResourceLimit("node budget of %d structures exhausted" % node_budget)

    def first_false(s: Structure) -> Optional[Conjecture]:
        for c in conjectures:
            if not evaluate(s, c.formula):
                return c
        return None

    try:
        for sz in _size_vectors(sizes, upto):
            ex = Explorer(mon.system, sz)
            for s in ex.initial_states():
                tick()
                c = first_false(s)
                if c is not None:
                    return _cti(Cti("init", s, None, c.name, _false_path(s, c.formula)), sizes, n)
            for s in invariant_states(mon.vocab, inv, sz):
                tick()
                if evaluate(s, mon.error):
                    return _cti(Cti("safety", s, None, None, _false_path(s, neg(mon.error))), sizes, n)
                for t in ex.successors(s):
                    tick()
                    c = first_false(t)
                    if c is not None:
                        return _cti(Cti("consecution", s, t, c.name, _false_path(t, c.formula)), sizes, n)
    except ResourceLimit as e:
        return CheckResult(INCONCLUSIVE, bound=sizes, checked=n, reason=str(e))
    return CheckResult(HOLDS, bound=sizes, checked=n)


def _cti(c: Cti, sizes, n) -> CheckResult:
    return CheckResult(CTI, cti=c, bound=sizes, checked=n)


def cti_is_valid(mon: Monitor, conjectures: Sequence[Conjecture], c: Cti) -> bool:
    """Re-evaluate the failed VC on the exhibited structures."""
    inv = conj(*(x.formula for x in conjectures))
    by_name = {x.name: x for x in conjectures}
    if c.vc == "init":
        return evaluate(c.state, mon.system.init) and not evaluate(c.state, by_name[c.conjecture].formula)
    if c.vc == "safety":
        return evaluate(c.state, inv) and evaluate(c.state, mon.error)
    if c.vc == "consecution":
        return (evaluate(c.state, inv) and evaluate(c.state, mon.system.trans, post=c.post)
                and not evaluate(c.post, by_name[c.conjecture].formula))
    return False


# -------------------------------------------------------------- VC export

VC_FILES = ("init.smt2", "consecution.smt2", "safety.smt2")


def export_vcs(mon: Monitor, conjectures: Sequence[Conjecture], out_dir: Optional[str] = None) -> Dict[str, str]:
    """One SMT-LIB script per VC; each is unsat exactly when the VC is valid."""
    inv = conj(*(c.formula for c in conjectures))
    names = ", ".join(c.name for c in conjectures) or "(none)"
    post_inv = prime_formula(inv, mon.vocab.dynamic_names())
    files = {
        "init.smt2": script(mon.vocab, [mon.system.init, Not(inv)],
                            "initiation: init & ~inv\nconjectures: %s" % names),
        "consecution.smt2": script(mon.vocab, [inv, mon.system.trans, Not(post_inv)],
                                   "consecution: inv & trans & ~inv'\nconjectures: %s" % names),
        "safety.smt2": script(mon.vocab, [inv, mon.error],
                              "safety: inv & error\nconjectures: %s" % names),
    }
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for fn, text in files.items():
            with open(os.path.join(out_dir, fn), "w") as fh:
                fh.write(text)
    return files


# ---------------------------------------------------------------- closure

@dataclass
class ClosureReport:
    premises: List[CheckResult]
    conclusion: Optional[CheckResult]
    union: ProphecySpec
    applicable: bool        # every premise came back no-lasso
    violation: bool
    note: str = "bounded evidence only: a pass at this bound is not a proof"


def union_spec(goals: Sequence[Formula], specs: Sequence[ProphecySpec]) -> ProphecySpec:
    """Prophecy for the conclusion: every ~goal_i and all of A_i and B_i.

    Witness constants that clash between specs are renamed apart."""
    extra: List[Formula] = []
    ws: List[WitnessSpec] = []
    taken = set()
    for g, sp in zip(goals, specs):
        extra.append(normalize(Not(g)))
        extra.extend(sp.extra)
        for w in sp.witnesses:
            if w in ws:
                continue
            consts = []
            for c in w.consts:
                new, n = c, 1
                while new in taken:
                    n += 1
                    new = "%s_%d" % (c, n)
                taken.add(new)
                consts.append(new)
            ws.append(WitnessSpec(w.formula, tuple(consts), w.sorts))
    return ProphecySpec(list(dict.fromkeys(extra)), ws)


def closure_harness(S: TransitionSystem, goals: Sequence[Formula], psi: Formula, specs: Sequence[ProphecySpec],
                    bound: DomainBound, maxlen: int, hooks: Optional[Hooks] = None,
                    engine: str = "grouped") -> ClosureReport:
    """If every (goal_i, A_i, B_i) has no lasso, (psi, union A, union B) must have none.

    The caller guarantees that the goals entail psi first-order."""
    if len(goals) != len(specs):
        raise ValueError("one prophecy spec per goal")
    premises = [check_property(S, g, sp, bound, maxlen, hooks, engine=engine) for g, sp in zip(goals, specs)]
    u = union_spec(goals, specs)
    applicable = all(p.verdict == NO_LASSO for p in premises)
    conclusion = check_property(S, psi, u, bound, maxlen, hooks, engine=engine) if applicable else None
    violation = applicable and conclusion.verdict == LASSO
    return ClosureReport(premises, conclusion, u, applicable, violation)
