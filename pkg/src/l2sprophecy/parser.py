"""Front-end for the s-expression model, property and formula syntax.

Formulas::

    true false (not f) (and f...) (or f...) (implies f g) (iff f g)
    (= t u) (!= t u) (forall (x sort) f) (forall ((x s) (y t)) f)
    (exists ...) (globally f) (eventually f) (r t...) r

Identifiers that are neither bound nor declared and start with an upper
case letter are free variables; their sort comes from the position they
occur in.  Symbols ending in ``'`` denote the post-state (transition
formulas only).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from .logic import SpecificationError, Vocabulary, check_formula
from .sexpr import Atom, ParseError, SExpr, SList, read_all, read_one, where
from .syntax import (
    FALSE, TRUE, App, Const, Eq, Eventually, Exists, Forall, Formula, Globally, Iff, Implies, Not, Rel, Term, Var,
    conj, disj, forall, free_vars_ordered, is_primed, prime, unprime,
)

NOT = {"not", "~", "!"}
AND = {"and", "&"}
OR = {"or", "|"}
IMPLIES = {"implies", "->", "=>"}
IFF = {"iff", "<->", "<=>"}
FORALL = {"forall"}
EXISTS = {"exists"}
GLOBALLY = {"globally", "always", "[]"}
EVENTUALLY = {"eventually", "<>"}
NEQ = {"!=", "~="}
ITE = {"if", "ite"}


class SortMismatch(ParseError):
    """A well-formed expression used at the wrong sort."""


class _NeedSort(Exception):
    pass


Special = Callable[["FormulaParser", SList, Dict[str, Var]], Formula]


class FormulaParser:
    """Parses formulas against a vocabulary.

    ``specials`` maps a head symbol to a handler; it lets the invariant
    language add the monitor accessors without touching this class.
    """

    def __init__(self, vocab: Vocabulary, allow_primed: bool = False, allow_temporal: bool = True,
                 source: str = "<input>", specials: Optional[Mapping[str, Special]] = None,
                 free_variables: bool = True):
        self.vocab = vocab
        self.allow_primed = allow_primed
        self.allow_temporal = allow_temporal
        self.source = source
        self.specials = dict(specials or {})
        self.free_variables = free_variables
        self.free: Dict[str, Var] = {}

    def error(self, msg: str, x) -> ParseError:
        line, col = where(x)
        return ParseError(msg, line, col, self.source)

    def sort_error(self, msg: str, x) -> "SortMismatch":
        line, col = where(x)
        return SortMismatch(msg, line, col, self.source)

    # ------------------------------------------------------------- helpers
    def _symbol(self, name: str, x) -> str:
        if is_primed(name):
            if not self.allow_primed:
                raise self.error("primed symbol %r is only allowed in transition formulas" % name, x)
            base = unprime(name)
            if base in self.vocab.static:
                raise self.error("static symbol %r cannot be primed" % base, x)
            return base
        return name

    def binders(self, x, env: Dict[str, Var]) -> Tuple[Tuple[Var, ...], Dict[str, Var]]:
        if not isinstance(x, SList) or not x:
            raise self.error("expected binder list like (x sort) or ((x sort) ...)", x)
        groups = [x] if isinstance(x[0], Atom) else list(x)
        out = []
        inner = dict(env)
        for g in groups:
            if not isinstance(g, SList) or len(g) != 2 or not all(isinstance(a, Atom) for a in g):
                raise self.error("malformed binder %s" % (g,), g)
            name, sort = str(g[0]), str(g[1])
            if sort not in self.vocab.sorts:
                raise self.error("unknown sort %r" % sort, g[1])
            v = Var(name, sort)
            inner[name] = v
            out.append(v)
        return tuple(out), inner

    def _arity(self, x: SList, n: int) -> None:
        if len(x) - 1 != n:
            raise self.error("%s expects %d argument%s, got %d" % (x[0], n, "" if n == 1 else "s", len(x) - 1), x)

    # --------------------------------------------------------------- terms
    def term(self, x: SExpr, env: Dict[str, Var], expected: Optional[str] = None) -> Term:
        if isinstance(x, Atom):
            name = str(x)
            if name in env:
                v = env[name]
                if expected is not None and v.sort != expected:
                    raise self.sort_error("variable %s has sort %s, expected %s" % (name, v.sort, expected), x)
                return v
            base = unprime(name)
            if base in self.vocab.const_index:
                self._symbol(name, x)
                sort = self.vocab.const_sort(base)
                if expected is not None and sort != expected:
                    raise self.sort_error("constant %s has sort %s, expected %s" % (name, sort, expected), x)
                return Const(name)
            if base in self.vocab.rel_index or base in self.vocab.func_index:
                raise self.error("%r is not a term" % name, x)
            if self.free_variables and name[:1].isupper():
                if name in self.free:
                    v = self.free[name]
                    if expected is not None and v.sort != expected:
                        raise self.sort_error("free variable %s used at sorts %s and %s" % (name, v.sort, expected), x)
                    return v
                if expected is None:
                    raise _NeedSort(name)
                v = Var(name, expected)
                self.free[name] = v
                return v
            raise self.error("unknown symbol %r" % name, x)
        if not x:
            raise self.error("empty term", x)
        head = x[0]
        if not isinstance(head, Atom):
            raise self.error("function application needs a symbol head", x)
        name = self._symbol(str(head), head)
        if name not in self.vocab.func_index:
            raise self.error("unknown function %r" % str(head), head)
        args, res = self.vocab.signature(name)
        self._arity(x, len(args))
        if expected is not None and res != expected:
            raise self.sort_error("%s returns %s, expected %s" % (head, res, expected), x)
        return App(str(head), tuple(self.term(a, env, s) for a, s in zip(x[1:], args)))

    # ------------------------------------------------------------ formulas
    def formula(self, x: SExpr, env: Optional[Dict[str, Var]] = None) -> Formula:
        env = {} if env is None else env
        if isinstance(x, Atom):
            name = str(x)
            if name == "true":
                return TRUE
            if name == "false":
                return FALSE
            base = self._symbol(name, x)
            if base in self.vocab.rel_index:
                if self.vocab.signature(base)[0]:
                    raise self.error("relation %r needs arguments" % name, x)
                return Rel(name)
            raise self.error("unknown proposition %r" % name, x)
        if not x:
            raise self.error("empty formula", x)
        head = x[0]
        if isinstance(head, SList):
            if head and isinstance(head[0], Atom) and str(head[0]) in self.specials:
                return self.specials[str(head[0])](self, x, env)
            raise self.error("formula head must be a symbol", x)
        h = str(head)
        if h in self.specials:
            return self.specials[h](self, x, env)
        if h in NOT:
            self._arity(x, 1)
            return Not(self.formula(x[1], env))
        if h in AND:
            return conj(*(self.formula(a, env) for a in x[1:])) if len(x) != 2 else self.formula(x[1], env)
        if h in OR:
            return disj(*(self.formula(a, env) for a in x[1:])) if len(x) != 2 else self.formula(x[1], env)
        if h in IMPLIES:
            self._arity(x, 2)
            return Implies(self.formula(x[1], env), self.formula(x[2], env))
        if h in IFF:
            self._arity(x, 2)
            return Iff(self.formula(x[1], env), self.formula(x[2], env))
        if h in ITE:
            self._arity(x, 3)
            c = self.formula(x[1], env)
            return disj(conj(c, self.formula(x[2], env)), conj(Not(c), self.formula(x[3], env)))
        if h == "=" or h in NEQ:
            self._arity(x, 2)
            eq = self._equality(x[1], x[2], env)
            return Not(eq) if h in NEQ else eq
        if h in FORALL or h in EXISTS:
            self._arity(x, 2)
            vs, inner = self.binders(x[1], env)
            body = self.formula(x[2], inner)
            return Forall(vs, body) if h in FORALL else Exists(vs, body)
        if h in GLOBALLY or h in EVENTUALLY:
            if not self.allow_temporal:
                raise self.error("temporal operator %r not allowed here" % h, x)
            self._arity(x, 1)
            body = self.formula(x[1], env)
            return Globally(body) if h in GLOBALLY else Eventually(body)
        base = self._symbol(h, head)
        if base in self.vocab.rel_index:
            args = self.vocab.signature(base)[0]
            self._arity(x, len(args))
            return Rel(h, tuple(self.term(a, env, s) for a, s in zip(x[1:], args)))
        if base in self.vocab.func_index or base in self.vocab.const_index:
            raise self.error("%r is not a relation" % h, head)
        raise self.error("unknown relation or operator %r" % h, head)

    def _equality(self, a: SExpr, b: SExpr, env) -> Formula:
        try:
            lhs = self.term(a, env)
        except _NeedSort:
            try:
                rhs = self.term(b, env)
            except _NeedSort:
                raise self.sort_error("cannot infer the sort of either side of =", a)
            return Eq(self.term(a, env, _sort(rhs, self.vocab)), rhs)
        return Eq(lhs, self.term(b, env, _sort(lhs, self.vocab)))

    def top(self, x: SExpr, close: bool = False) -> Formula:
        """Parse a top-level formula; with ``close`` free variables are
        universally quantified."""
        try:
            f = self.formula(x, {})
        except _NeedSort as e:
            raise self.sort_error("cannot infer the sort of %s" % e.args[0], x)
        if close:
            f = forall(free_vars_ordered(f), f)
        return f


def _sort(t: Term, vocab: Vocabulary) -> str:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        return vocab.const_sort(unprime(t.name))
    return vocab.signature(unprime(t.func))[1]


def parse_formula(text: str, vocab: Vocabulary, allow_primed: bool = False, close: bool = False,
                  source: str = "<input>") -> Formula:
    p = FormulaParser(vocab, allow_primed=allow_primed, source=source)
    return p.top(read_one(text, source), close=close)


def parse_foltl(text: str, vocab: Vocabulary, source: str = "<input>") -> Formula:
    """Parse a temporal formula; free variables stay free."""
    return parse_formula(text, vocab, source=source)


# ------------------------------------------------------------------ models

@dataclass
class Action:
    name: str
    params: Tuple[Var, ...]
    guard: Formula
    update: Formula
    modified: Tuple[str, ...]
    havoc: Tuple[str, ...] = ()

    def formula(self, vocab: Vocabulary) -> Formula:
        keep = [n for n in vocab.dynamic_names() if n not in self.modified and n not in self.havoc]
        body = conj(self.guard, self.update, *(frame_formula(vocab, n) for n in keep))
        from .syntax import exists
        return exists(self.params, body)


def frame_formula(vocab: Vocabulary, name: str) -> Formula:
    """``name' = name`` for a constant, relation or function."""
    kind = vocab.kind(name)
    args, res = vocab.signature(name)
    if kind == "constant":
        return Eq(Const(prime(name)), Const(name))
    xs = tuple(Var("X%d" % (i + 1), s) for i, s in enumerate(args))
    if kind == "relation":
        return forall(xs, Iff(Rel(prime(name), xs), Rel(name, xs)))
    return forall(xs, Eq(App(prime(name), xs), App(name, xs)))


@dataclass
class Model:
    name: str
    vocab: Vocabulary
    init: Formula
    trans: Formula
    actions: List[Action] = field(default_factory=list)
    hooks: Dict[str, str] = field(default_factory=dict)
    source: str = "<input>"

    @property
    def system(self):
        from .ts import TransitionSystem
        return TransitionSystem(self.vocab, self.init, self.trans, self.name)


def _atoms(x: SList, what: str, src: str) -> List[str]:
    out = []
    for a in x:
        if not isinstance(a, Atom):
            line, col = where(a)
            raise ParseError("%s: expected a symbol" % what, line, col, src)
        out.append(str(a))
    return out


def load_model(text: str, source: str = "<model>", name: Optional[str] = None) -> Model:
    """Read a model file.

    Declarations: ``(sort s...)``, ``(relation r s...)``, ``(function f s... result)``,
    ``(constant c s)``, ``(static sym...)``, ``(interpret sym (kind sort))``.
    Behaviour: ``(init f)``, ``(action name (params (x s)...) (guard f) (update f)
    (frame sym...) (havoc sym...))``, ``(transition f)``.  Symbols an action
    neither updates nor havocs keep their value.  ``(footprint-closure sort
    (downward rel))`` enables the downward footprint hook.
    """
    forms = read_all(text, source)
    sorts: List[str] = []
    rels: List[Tuple[str, List[str]]] = []
    funcs: List[Tuple[str, List[str], str]] = []
    consts: List[Tuple[str, str]] = []
    static: List[str] = []
    interpreted: Dict[str, str] = {}
    rest = []

    def err(msg, x):
        line, col = where(x)
        return ParseError(msg, line, col, source)

    for f in forms:
        if not isinstance(f, SList) or not f or not isinstance(f[0], Atom):
            raise err("expected a declaration form", f)
        h = str(f[0])
        if h == "sort":
            sorts.extend(_atoms(f[1:], "sort", source))
        elif h == "relation":
            parts = _atoms(f[1:], "relation", source)
            if not parts:
                raise err("relation needs a name", f)
            rels.append((parts[0], parts[1:]))
        elif h == "function":
            parts = _atoms(f[1:], "function", source)
            if len(parts) < 3:
                raise err("function needs a name, argument sorts and a result sort", f)
            funcs.append((parts[0], parts[1:-1], parts[-1]))
        elif h == "constant":
            parts = _atoms(f[1:], "constant", source)
            if len(parts) != 2:
                raise err("constant needs a name and a sort", f)
            consts.append((parts[0], parts[1]))
        elif h == "static":
            static.extend(_atoms(f[1:], "static", source))
        elif h == "interpret":
            if len(f) != 3 or not isinstance(f[2], SList) or len(f[2]) != 2:
                raise err("expected (interpret sym (kind sort))", f)
            interpreted[str(f[1])] = str(f[2][0])
        elif h == "name":
            name = name or str(f[1])
        else:
            rest.append(f)
    try:
        vocab = Vocabulary(sorts, rels, funcs, consts, static, interpreted)
    except SpecificationError as e:
        raise ParseError(str(e), 1, 1, source)
    for n, kind in interpreted.items():
        args, res = vocab.signature(n)
        sort = res or args[0]
        decl = None
        for f in forms:
            if isinstance(f, SList) and str(f[0]) == "interpret" and str(f[1]) == n:
                decl = f
        if decl is not None and str(decl[2][1]) != sort:
            raise err("interpretation of %s is over %s, but %s is declared over %s" % (n, decl[2][1], n, sort), decl)

    init_parts: List[Formula] = []
    disjuncts: List[Formula] = []
    actions: List[Action] = []
    hooks: Dict[str, str] = {}
    fp = FormulaParser(vocab, allow_temporal=False, source=source, free_variables=False)
    tp = FormulaParser(vocab, allow_primed=True, allow_temporal=False, source=source, free_variables=False)
    for f in rest:
        h = str(f[0])
        if h == "init":
            for g in f[1:]:
                init_parts.append(fp.top(g))
        elif h == "transition":
            for g in f[1:]:
                disjuncts.append(tp.top(g))
        elif h == "action":
            act = _action(f, vocab, tp, source)
            actions.append(act)
            disjuncts.append(act.formula(vocab))
        elif h == "footprint-closure":
            if len(f) != 3 or not isinstance(f[2], SList) or len(f[2]) != 2 or str(f[2][0]) != "downward":
                raise err("expected (footprint-closure sort (downward rel))", f)
            sort, rel = str(f[1]), str(f[2][1])
            if sort not in vocab.sorts:
                raise err("unknown sort %r" % sort, f[1])
            if rel not in vocab.rel_index or vocab.signature(rel)[0] != (sort, sort):
                raise err("%r is not a binary relation over %s" % (rel, sort), f[2][1])
            if rel not in vocab.static:
                raise err("footprint hook relation %r must be static" % rel, f[2][1])
            hooks[sort] = rel
        else:
            raise err("unknown form %r" % h, f[0])
    statics = [frame_formula(vocab, n) for n in vocab.symbol_names()
               if n in vocab.static and n not in vocab.interpreted]
    trans = conj(disj(*disjuncts), *statics)
    return Model(name or source, vocab, conj(*init_parts), trans, actions, hooks, source)


def _action(f: SList, vocab: Vocabulary, tp: FormulaParser, source: str) -> Action:
    if len(f) < 2 or not isinstance(f[1], Atom):
        raise tp.error("action needs a name", f)
    name = str(f[1])
    env: Dict[str, Var] = {}
    params: Tuple[Var, ...] = ()
    guard, update = TRUE, TRUE
    framed: List[str] = []
    havoc: List[str] = []
    for part in f[2:]:
        if not isinstance(part, SList) or not part:
            raise tp.error("malformed action clause", part)
        h = str(part[0])
        if h == "params":
            vs, env = tp.binders(SList(part[1:], part.line, part.col), {}) if len(part) > 1 else ((), {})
            params = vs
        elif h == "guard":
            guard = conj(*(_no_prime(tp.formula(g, env), tp, g) for g in part[1:]))
        elif h == "update":
            update = conj(*(tp.formula(g, env) for g in part[1:]))
        elif h == "frame":
            framed.extend(_atoms(part[1:], "frame", source))
        elif h == "havoc":
            havoc.extend(_atoms(part[1:], "havoc", source))
        else:
            raise tp.error("unknown action clause %r" % h, part)
    from .syntax import symbols
    modified = tuple(sorted({unprime(s) for s in symbols(update) if is_primed(s)}))
    for n in framed + havoc:
        if not vocab.has(n):
            raise tp.error("unknown symbol %r in action %s" % (n, name), f)
    clash = set(framed) & set(modified)
    if clash:
        raise tp.error("action %s both updates and frames %s" % (name, ", ".join(sorted(clash))), f)
    return Action(name, params, guard, update, modified, tuple(havoc))


def _no_prime(g: Formula, tp: FormulaParser, x) -> Formula:
    from .syntax import symbols
    if any(is_primed(s) for s in symbols(g)):
        raise tp.error("guards may not mention post-state symbols", x)
    return g


def load_property(text: str, vocab: Vocabulary, source: str = "<property>") -> Formula:
    """A property file holds one formula, optionally wrapped in ``(property f)``.
    Free variables are universally closed."""
    forms = read_all(text, source)
    if len(forms) == 1 and isinstance(forms[0], SList) and forms[0] and str(forms[0][0]) == "property":
        forms = list(forms[0][1:])
    if len(forms) != 1:
        raise ParseError("a property file holds exactly one formula", 1, 1, source)
    f = FormulaParser(vocab, source=source).top(forms[0], close=True)
    check_formula(f, vocab)
    return f
