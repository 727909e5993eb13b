"""SMT-LIB 2 text for monitor verification conditions.

Sorts become uninterpreted sorts, symbols become ``declare-fun``s and
post-state symbols get a ``'`` suffix inside a quoted symbol.  Interpreted
statics are pinned down by axioms over a total order on their sort.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, List, Optional, Sequence

from .logic import Vocabulary
from .syntax import (
    And, App, Bool, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or, Rel, Term, Var, is_primed, symbols,
    unprime,
)

_SIMPLE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")
_RESERVED = {"and", "or", "not", "=>", "=", "forall", "exists", "true", "false", "ite", "let", "assert",
             "distinct", "Bool", "par", "_", "!", "as"}


class Names:
    """Injective map from our symbol names to SMT-LIB symbols."""

    def __init__(self):
        self.out: Dict[str, str] = {}
        self.used = set()

    def __call__(self, name: str) -> str:
        r = self.out.get(name)
        if r is not None:
            return r
        if _SIMPLE.match(name) and name not in _RESERVED:
            r = name
        else:
            body = name.replace("|", "/").replace("\\", "/")
            r = "|%s|" % body
        base, n = r.strip("|"), 1
        while r in self.used:
            n += 1
            r = "|%s#%d|" % (base, n)
        self.used.add(r)
        self.out[name] = r
        return r


class Printer:
    def __init__(self, vocab: Vocabulary, names: Optional[Names] = None):
        self.vocab = vocab
        self.n = names or Names()

    def sort(self, s: str) -> str:
        return self.n("S_" + s)

    def term(self, t: Term) -> str:
        if isinstance(t, Var):
            return _var_name(t)
        if isinstance(t, Const):
            return self.n(t.name)
        if isinstance(t, App):
            return "(%s %s)" % (self.n(t.func), " ".join(self.term(a) for a in t.args))
        raise TypeError(t)

    def formula(self, f: Formula) -> str:
        if isinstance(f, Bool):
            return "true" if f.value else "false"
        if isinstance(f, Rel):
            if not f.args:
                return self.n(f.name)
            return "(%s %s)" % (self.n(f.name), " ".join(self.term(a) for a in f.args))
        if isinstance(f, Eq):
            return "(= %s %s)" % (self.term(f.lhs), self.term(f.rhs))
        if isinstance(f, Not):
            return "(not %s)" % self.formula(f.body)
        if isinstance(f, (And, Or)):
            if not f.args:
                return "true" if isinstance(f, And) else "false"
            if len(f.args) == 1:
                return self.formula(f.args[0])
            op = "and" if isinstance(f, And) else "or"
            return "(%s %s)" % (op, " ".join(self.formula(a) for a in f.args))
        if isinstance(f, Implies):
            return "(=> %s %s)" % (self.formula(f.lhs), self.formula(f.rhs))
        if isinstance(f, Iff):
            return "(= %s %s)" % (self.formula(f.lhs), self.formula(f.rhs))
        if isinstance(f, (Forall, Exists)):
            if not f.vars:
                return self.formula(f.body)
            q = "forall" if isinstance(f, Forall) else "exists"
            bs = " ".join("(%s %s)" % (_var_name(v), self.sort(v.sort)) for v in f.vars)
            return "(%s (%s) %s)" % (q, bs, self.formula(f.body))
        raise TypeError("cannot export %s" % (f,))


def _var_name(v: Var) -> str:
    n = v.name
    if _SIMPLE.match(n) and n not in _RESERVED:
        return "v_" + n
    return "|v_%s|" % n.replace("|", "/")


def _static_axioms(p: Printer, vocab: Vocabulary) -> List[str]:
    """Axioms fixing interpreted symbols; each sort that needs one gets a
    total order (the declared one if there is one)."""
    by_sort: Dict[str, List[tuple]] = {}
    for name, kind in sorted(vocab.interpreted.items()):
        args, res = vocab.signature(name)
        sort = res if res is not None else args[0]
        by_sort.setdefault(sort, []).append((name, kind))
    out = []
    for sort in sorted(by_sort):
        items = by_sort[sort]
        S = p.sort(sort)
        orders = [n for n, k in items if k == "order"]
        if orders:
            le = p.n(orders[0])
        else:
            le = p.n("le." + sort)
            out.append("(declare-fun %s (%s %s) Bool)" % (le, S, S))
        x, y, z = "x", "y", "z"
        two = "((%s %s) (%s %s))" % (x, S, y, S)
        three = "((%s %s) (%s %s) (%s %s))" % (x, S, y, S, z, S)
        out.append("(assert (forall ((%s %s)) (%s %s %s)))" % (x, S, le, x, x))
        out.append("(assert (forall %s (=> (and (%s x y) (%s y x)) (= x y))))" % (two, le, le))
        out.append("(assert (forall %s (=> (and (%s x y) (%s y z)) (%s x z))))" % (three, le, le, le))
        out.append("(assert (forall %s (or (%s x y) (%s y x))))" % (two, le, le))
        succ = "(and (%s x y) (not (= x y)) (forall ((z %s)) (=> (and (%s x z) (%s z y)) (or (= z x) (= z y)))))" \
            % (le, S, le, le)
        top = "(forall ((z %s)) (%s z x))" % (S, le)
        for name, kind in items:
            n = p.n(name)
            if kind == "order" and n == le:
                continue
            if kind == "order":
                out.append("(assert (forall %s (= (%s x y) (%s x y))))" % (two, n, le))
            elif kind == "strict-order":
                out.append("(assert (forall %s (= (%s x y) (and (%s x y) (not (= x y))))))" % (two, n, le))
            elif kind == "successor":
                out.append("(assert (forall %s (= (%s x y) %s)))" % (two, n, succ))
            elif kind == "saturating-successor":
                out.append("(assert (forall %s (= (%s x y) (or %s (and (= x y) %s)))))" % (two, n, succ, top))
            elif kind == "min":
                out.append("(assert (forall ((z %s)) (%s %s z)))" % (S, le, n))
            elif kind == "max":
                out.append("(assert (forall ((z %s)) (%s z %s)))" % (S, le, n))
    return out


def _declare(p: Printer, vocab: Vocabulary, names: Iterable[str]) -> List[str]:
    out = []
    for full in names:
        base = unprime(full)
        args, res = vocab.signature(base)
        a = " ".join(p.sort(s) for s in args)
        r = "Bool" if vocab.kind(base) == "relation" else p.sort(res)
        out.append("(declare-fun %s (%s) %s)" % (p.n(full), a, r))
    return out


def script(vocab: Vocabulary, assertions: Sequence[Formula], comment: str = "") -> str:
    """A ``check-sat`` script asserting ``assertions`` (unsat = VC valid)."""
    p = Printer(vocab)
    used = set()
    for f in assertions:
        used |= symbols(f)
    order = {n: i for i, n in enumerate(vocab.symbol_names())}
    decl = sorted((n for n in used if not is_primed(n)), key=order.get)
    decl += sorted((n for n in used if is_primed(n)), key=lambda n: order[unprime(n)])
    decl_set = set(decl)
    decl += [n for n in vocab.interpreted if n not in decl_set]
    lines = []
    if comment:
        lines += ["; " + c for c in comment.splitlines()]
    for s in vocab.sorts:
        lines.append("(declare-sort %s 0)" % p.sort(s))
    lines += _declare(p, vocab, decl)
    lines += _static_axioms(p, vocab)
    for f in assertions:
        lines.append("(assert %s)" % p.formula(f))
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
