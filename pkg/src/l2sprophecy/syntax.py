"""Abstract syntax shared by first-order and temporal formulas.

Terms are variables, constants and function applications. Post-state symbols
(the primed copy used inside transition formulas) are ordinary names carrying
a trailing ``'``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Tuple, Union

PRIME = "'"


def prime(name: str) -> str:
    return name + PRIME


def is_primed(name: str) -> bool:
    return name.endswith(PRIME)


def unprime(name: str) -> str:
    return name[:-1] if name.endswith(PRIME) else name


# --------------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    func: str
    args: Tuple["Term", ...]

    def __str__(self) -> str:
        return "%s(%s)" % (self.func, ", ".join(map(str, self.args)))


Term = Union[Var, Const, App]


# ------------------------------------------------------------------ formulas

@dataclass(frozen=True)
class Bool:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Rel:
    name: str
    args: Tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return "%s(%s)" % (self.name, ", ".join(map(str, self.args)))


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return "%s = %s" % (self.lhs, self.rhs)


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        if isinstance(self.body, Eq):
            return "%s ~= %s" % (self.body.lhs, self.body.rhs)
        return "~" + _wrap(self.body)


@dataclass(frozen=True)
class Or:
    args: Tuple["Formula", ...]

    def __str__(self) -> str:
        return " | ".join(_wrap(a) for a in self.args) if self.args else "false"


@dataclass(frozen=True)
class And:
    args: Tuple["Formula", ...]

    def __str__(self) -> str:
        return " & ".join(_wrap(a) for a in self.args) if self.args else "true"


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return "%s -> %s" % (_wrap(self.lhs), _wrap(self.rhs))


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self) -> str:
        return "%s <-> %s" % (_wrap(self.lhs), _wrap(self.rhs))


@dataclass(frozen=True)
class Exists:
    vars: Tuple[Var, ...]
    body: "Formula"

    def __str__(self) -> str:
        return "exists %s. %s" % (_binders(self.vars), self.body)


@dataclass(frozen=True)
class Forall:
    vars: Tuple[Var, ...]
    body: "Formula"

    def __str__(self) -> str:
        return "forall %s. %s" % (_binders(self.vars), self.body)


@dataclass(frozen=True)
class Globally:
    body: "Formula"

    def __str__(self) -> str:
        return "[]" + _wrap(self.body)


@dataclass(frozen=True)
class Eventually:
    body: "Formula"

    def __str__(self) -> str:
        return "<>" + _wrap(self.body)


Formula = Union[Bool, Rel, Eq, Not, Or, And, Implies, Iff, Exists, Forall, Globally, Eventually]

ATOMS = (Bool, Rel, Eq)
QUANTIFIERS = (Exists, Forall)
TEMPORAL = (Globally, Eventually)


def _binders(vs: Iterable[Var]) -> str:
    return ", ".join("%s:%s" % (v.name, v.sort) for v in vs)


def _wrap(f: "Formula") -> str:
    if isinstance(f, (Bool, Rel, Eq, Not, Globally, Eventually)):
        return str(f)
    return "(%s)" % f


TRUE = Bool(True)
FALSE = Bool(False)


# ------------------------------------------------------------ constructors

def conj(*fs: Formula) -> Formula:
    args = []
    for f in fs:
        if isinstance(f, And):
            args.extend(f.args)
        elif f == TRUE:
            continue
        else:
            args.append(f)
    if any(a == FALSE for a in args):
        return FALSE
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*fs: Formula) -> Formula:
    args = []
    for f in fs:
        if isinstance(f, Or):
            args.extend(f.args)
        elif f == FALSE:
            continue
        else:
            args.append(f)
    if any(a == TRUE for a in args):
        return TRUE
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def neg(f: Formula) -> Formula:
    """Negation with double-negation and constant folding."""
    if isinstance(f, Not):
        return f.body
    if isinstance(f, Bool):
        return Bool(not f.value)
    return Not(f)


def forall(vs: Iterable[Var], body: Formula) -> Formula:
    vs = tuple(vs)
    return Forall(vs, body) if vs else body


def exists(vs: Iterable[Var], body: Formula) -> Formula:
    vs = tuple(vs)
    return Exists(vs, body) if vs else body


# ----------------------------------------------------------------- traversal

def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, (Not, Globally, Eventually)):
        return (f.body,)
    if isinstance(f, (Or, And)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.lhs, f.rhs)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def term_vars(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from term_vars(a)


def atom_terms(f: Formula) -> Tuple[Term, ...]:
    if isinstance(f, Rel):
        return f.args
    if isinstance(f, Eq):
        return (f.lhs, f.rhs)
    return ()


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> FrozenSet[Var]:
    if isinstance(f, (Rel, Eq)):
        out = set()
        for t in atom_terms(f):
            out.update(term_vars(t))
        return frozenset(out)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - frozenset(f.vars)
    out = frozenset()
    for c in children(f):
        out = out | free_vars(c)
    return out


def free_vars_ordered(f: Formula) -> Tuple[Var, ...]:
    """Free variables in order of first occurrence (left to right)."""
    seen: Dict[Var, None] = {}

    def walk(g: Formula, bound: FrozenSet[Var]) -> None:
        if isinstance(g, (Rel, Eq)):
            for t in atom_terms(g):
                for v in term_vars(t):
                    if v not in bound and v not in seen:
                        seen[v] = None
            return
        if isinstance(g, (Exists, Forall)):
            walk(g.body, bound | frozenset(g.vars))
            return
        for c in children(g):
            walk(c, bound)

    walk(f, frozenset())
    return tuple(seen)


def _term_symbols(t: Term, out: set) -> None:
    if isinstance(t, Const):
        out.add(t.name)
    elif isinstance(t, App):
        out.add(t.func)
        for a in t.args:
            _term_symbols(a, out)


@lru_cache(maxsize=None)
def symbols(f: Formula) -> FrozenSet[str]:
    """All vocabulary symbol names mentioned by ``f`` (primed names kept)."""
    out: set = set()
    if isinstance(f, Rel):
        out.add(f.name)
    for t in atom_terms(f):
        _term_symbols(t, out)
    for c in children(f):
        out |= symbols(c)
    return frozenset(out)


def is_temporal(f: Formula) -> bool:
    if isinstance(f, TEMPORAL):
        return True
    return any(is_temporal(c) for c in children(f))


def temporal_depth(f: Formula) -> int:
    inner = max((temporal_depth(c) for c in children(f)), default=0)
    return inner + 1 if isinstance(f, TEMPORAL) else inner


def subst_term(t: Term, m: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, App):
        return App(t.func, tuple(subst_term(a, m) for a in t.args))
    return t


def substitute(f: Formula, m: Mapping[Var, Term]) -> Formula:
    """Capture-avoiding only in the trivial sense: bound variables shadow ``m``.

    Callers substitute closed terms (constants) or fresh variables, so no
    renaming is needed.
    """
    if not m:
        return f
    if isinstance(f, Rel):
        return Rel(f.name, tuple(subst_term(a, m) for a in f.args))
    if isinstance(f, Eq):
        return Eq(subst_term(f.lhs, m), subst_term(f.rhs, m))
    if isinstance(f, Bool):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.body, m))
    if isinstance(f, Or):
        return Or(tuple(substitute(a, m) for a in f.args))
    if isinstance(f, And):
        return And(tuple(substitute(a, m) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(f.lhs, m), substitute(f.rhs, m))
    if isinstance(f, Iff):
        return Iff(substitute(f.lhs, m), substitute(f.rhs, m))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in m.items() if k not in f.vars}
        return type(f)(f.vars, substitute(f.body, inner))
    if isinstance(f, Globally):
        return Globally(substitute(f.body, m))
    if isinstance(f, Eventually):
        return Eventually(substitute(f.body, m))
    raise TypeError(f)


def rename_term_symbols(t: Term, m: Mapping[str, str]) -> Term:
    if isinstance(t, Const):
        return Const(m.get(t.name, t.name))
    if isinstance(t, App):
        return App(m.get(t.func, t.func), tuple(rename_term_symbols(a, m) for a in t.args))
    return t


def rename_symbols(f: Formula, m: Mapping[str, str]) -> Formula:
    """Rename vocabulary symbols (e.g. to their primed copies)."""
    if isinstance(f, Rel):
        return Rel(m.get(f.name, f.name), tuple(rename_term_symbols(a, m) for a in f.args))
    if isinstance(f, Eq):
        return Eq(rename_term_symbols(f.lhs, m), rename_term_symbols(f.rhs, m))
    if isinstance(f, Bool):
        return f
    if isinstance(f, (Not, Globally, Eventually)):
        return type(f)(rename_symbols(f.body, m))
    if isinstance(f, (Or, And)):
        return type(f)(tuple(rename_symbols(a, m) for a in f.args))
    if isinstance(f, (Implies, Iff)):
        return type(f)(rename_symbols(f.lhs, m), rename_symbols(f.rhs, m))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.vars, rename_symbols(f.body, m))
    raise TypeError(f)


def prime_formula(f: Formula, names: Iterable[str]) -> Formula:
    return rename_symbols(f, {n: prime(n) for n in names})
