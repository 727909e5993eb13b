"""Many-sorted first-order logic over finite structures.

Elements of a sort of size ``n`` are the integers ``0 .. n-1``.  Structures
are immutable and hashable; they are the states explored by the checkers.
"""

from __future__ import annotations

import itertools
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .syntax import (
    And, App, Bool, Const, Eq, Eventually, Exists, Forall, Formula, Globally, Iff, Implies, Not, Or, Rel,
    Term, Var, is_primed, unprime,
)


class SpecificationError(Exception):
    """An ill-sorted formula, an unknown symbol or an unbound variable."""


class SortError(SpecificationError):
    pass


# ------------------------------------------------------------- vocabularies

INTERPRETATIONS = ("order", "strict-order", "successor", "saturating-successor", "min", "max")


class Vocabulary:
    """Sorted signature.  Symbol order is significant (it fixes the layout of
    :class:`Structure` tuples)."""

    __slots__ = ("sorts", "relations", "functions", "constants", "static", "interpreted",
                 "rel_index", "func_index", "const_index", "_key", "_hash")

    def __init__(self, sorts: Iterable[str], relations: Iterable[Tuple[str, Sequence[str]]] = (),
                 functions: Iterable[Tuple[str, Sequence[str], str]] = (),
                 constants: Iterable[Tuple[str, str]] = (), static: Iterable[str] = (),
                 interpreted: Optional[Mapping[str, str]] = None):
        self.sorts: Tuple[str, ...] = tuple(sorts)
        self.relations: Tuple[Tuple[str, Tuple[str, ...]], ...] = tuple((n, tuple(a)) for n, a in relations)
        self.functions: Tuple[Tuple[str, Tuple[str, ...], str], ...] = tuple(
            (n, tuple(a), r) for n, a, r in functions)
        self.constants: Tuple[Tuple[str, str], ...] = tuple((n, s) for n, s in constants)
        self.interpreted: Dict[str, str] = dict(interpreted or {})
        self.static: FrozenSet[str] = frozenset(static) | frozenset(self.interpreted)
        self.rel_index = {n: i for i, (n, _) in enumerate(self.relations)}
        self.func_index = {n: i for i, (n, _, _) in enumerate(self.functions)}
        self.const_index = {n: i for i, (n, _) in enumerate(self.constants)}
        self._check()
        self._key = (self.sorts, self.relations, self.functions, self.constants, self.static,
                     tuple(sorted(self.interpreted.items())))
        self._hash = hash(self._key)

    def _check(self) -> None:
        if len(set(self.sorts)) != len(self.sorts):
            raise SpecificationError("duplicate sort in %r" % (self.sorts,))
        names = [n for n, _ in self.relations] + [n for n, _, _ in self.functions] + [n for n, _ in self.constants]
        seen = set()
        for n in names:
            if n in seen:
                raise SpecificationError("symbol %r declared twice" % n)
            seen.add(n)
        for n, args in self.relations:
            self._check_sorts(n, args)
        for n, args, res in self.functions:
            if not args:
                raise SpecificationError("function %r needs arguments; declare a constant instead" % n)
            self._check_sorts(n, args + (res,))
        for n, s in self.constants:
            self._check_sorts(n, (s,))
        for n in self.static:
            if n not in seen:
                raise SpecificationError("static symbol %r is not declared" % n)
        for n, kind in self.interpreted.items():
            if kind not in INTERPRETATIONS:
                raise SpecificationError("unknown interpretation %r for %r" % (kind, n))
            if kind in ("min", "max"):
                if n not in self.const_index:
                    raise SpecificationError("%s interpretation needs a constant: %r" % (kind, n))
            else:
                sig = dict(self.relations).get(n)
                if sig is None or len(sig) != 2 or sig[0] != sig[1]:
                    raise SpecificationError("%s interpretation needs a binary relation on one sort: %r" % (kind, n))

    def _check_sorts(self, name: str, sorts: Sequence[str]) -> None:
        for s in sorts:
            if s not in self.sorts:
                raise SpecificationError("symbol %r uses undeclared sort %r" % (name, s))

    def __eq__(self, other: object) -> bool:
        return self is other or (isinstance(other, Vocabulary) and self._key == other._key)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "Vocabulary(%s)" % ", ".join(self.symbol_names())

    # lookup -----------------------------------------------------------------
    def symbol_names(self) -> List[str]:
        return [n for n, _ in self.constants] + [n for n, _ in self.relations] + [n for n, _, _ in self.functions]

    def kind(self, name: str) -> str:
        if name in self.const_index:
            return "constant"
        if name in self.rel_index:
            return "relation"
        if name in self.func_index:
            return "function"
        raise SpecificationError("unknown symbol %r" % name)

    def has(self, name: str) -> bool:
        return name in self.const_index or name in self.rel_index or name in self.func_index

    def signature(self, name: str) -> Tuple[Tuple[str, ...], Optional[str]]:
        """(argument sorts, result sort); result is None for relations."""
        if name in self.const_index:
            return (), self.constants[self.const_index[name]][1]
        if name in self.rel_index:
            return self.relations[self.rel_index[name]][1], None
        if name in self.func_index:
            _, args, res = self.functions[self.func_index[name]]
            return args, res
        raise SpecificationError("unknown symbol %r" % name)

    def const_sort(self, name: str) -> str:
        return self.constants[self.const_index[name]][1]

    def dynamic_names(self) -> List[str]:
        return [n for n in self.symbol_names() if n not in self.static]

    # construction -----------------------------------------------------------
    def extend(self, relations: Iterable[Tuple[str, Sequence[str]]] = (),
               functions: Iterable[Tuple[str, Sequence[str], str]] = (),
               constants: Iterable[Tuple[str, str]] = (), sorts: Iterable[str] = (),
               static: Iterable[str] = ()) -> "Vocabulary":
        return Vocabulary(self.sorts + tuple(s for s in sorts if s not in self.sorts),
                          self.relations + tuple((n, tuple(a)) for n, a in relations),
                          self.functions + tuple((n, tuple(a), r) for n, a, r in functions),
                          self.constants + tuple(constants),
                          self.static | frozenset(static), self.interpreted)

    def subset(self, names: Iterable[str]) -> "Vocabulary":
        keep = set(names)
        return Vocabulary(self.sorts,
                          [r for r in self.relations if r[0] in keep],
                          [f for f in self.functions if f[0] in keep],
                          [c for c in self.constants if c[0] in keep],
                          [n for n in self.static if n in keep],
                          {n: k for n, k in self.interpreted.items() if n in keep})

    def is_subvocabulary_of(self, other: "Vocabulary") -> bool:
        if any(s not in other.sorts for s in self.sorts):
            return False
        for n in self.symbol_names():
            if not other.has(n) or other.signature(n) != self.signature(n):
                return False
        return True


# --------------------------------------------------------------- structures

def table_strides(arg_sorts: Sequence[str], sizes: Mapping[str, int]) -> Tuple[int, ...]:
    strides = []
    acc = 1
    for s in reversed(arg_sorts):
        strides.append(acc)
        acc *= sizes[s]
    return tuple(reversed(strides))


def table_points(arg_sorts: Sequence[str], sizes: Mapping[str, int]) -> List[Tuple[int, ...]]:
    """Argument tuples of a function table, in row-major (storage) order."""
    return list(itertools.product(*(range(sizes[s]) for s in arg_sorts)))


def interpret_static(kind: str, size: int):
    if kind == "order":
        return frozenset((x, y) for x in range(size) for y in range(size) if x <= y)
    if kind == "strict-order":
        return frozenset((x, y) for x in range(size) for y in range(size) if x < y)
    if kind == "successor":
        return frozenset((x, x + 1) for x in range(size - 1))
    if kind == "saturating-successor":
        return frozenset((x, min(x + 1, size - 1)) for x in range(size))
    if kind == "min":
        return 0
    if kind == "max":
        return size - 1
    raise SpecificationError(kind)


class Structure:
    """A finite first-order structure ``(D, I)`` over a :class:`Vocabulary`.

    ``consts``, ``rels`` and ``funcs`` are tuples aligned with the
    vocabulary's declaration order; a function is stored as its flat
    row-major value table.
    """

    __slots__ = ("vocab", "sizes", "consts", "rels", "funcs", "_hash")

    def __init__(self, vocab: Vocabulary, sizes: Mapping[str, int], consts: Tuple[int, ...],
                 rels: Tuple[FrozenSet[tuple], ...], funcs: Tuple[Tuple[int, ...], ...]):
        self.vocab = vocab
        self.sizes = sizes
        self.consts = consts
        self.rels = rels
        self.funcs = funcs
        self._hash = hash((consts, rels, funcs))

    @classmethod
    def build(cls, vocab: Vocabulary, sizes: Mapping[str, int], consts: Mapping[str, int] = None,
              rels: Mapping[str, Iterable[tuple]] = None, funcs: Mapping[str, Mapping[tuple, int]] = None,
              validate: bool = True) -> "Structure":
        """Build from per-symbol dictionaries; interpreted statics are filled in."""
        consts = dict(consts or {})
        rels = dict(rels or {})
        funcs = dict(funcs or {})
        sizes = dict(sizes)
        for s in vocab.sorts:
            if s not in sizes:
                raise SpecificationError("no domain size for sort %r" % s)
        for name, kind in vocab.interpreted.items():
            sort = vocab.signature(name)[1] or vocab.signature(name)[0][0]
            val = interpret_static(kind, sizes[sort])
            (consts if kind in ("min", "max") else rels)[name] = val
        ctuple = []
        for n, s in vocab.constants:
            if n not in consts:
                raise SpecificationError("constant %r has no value" % n)
            ctuple.append(consts[n])
        rtuple = tuple(frozenset(tuple(t) for t in rels.get(n, ())) for n, _ in vocab.relations)
        ftuple = []
        for n, args, _ in vocab.functions:
            m = funcs.get(n)
            if m is None:
                raise SpecificationError("function %r has no table" % n)
            if isinstance(m, tuple):
                ftuple.append(m)
            else:
                ftuple.append(tuple(m[p] if p in m else m[p[0]] if len(p) == 1 and p[0] in m else _missing(n, p)
                                    for p in table_points(args, sizes)))
        s = cls(vocab, sizes, tuple(ctuple), rtuple, tuple(ftuple))
        if validate:
            s.validate()
        return s

    def validate(self) -> None:
        v, sizes = self.vocab, self.sizes
        for (n, sort), val in zip(v.constants, self.consts):
            if not 0 <= val < sizes[sort]:
                raise SpecificationError("constant %r = %r outside domain of %r" % (n, val, sort))
        for (n, args), tuples in zip(v.relations, self.rels):
            for t in tuples:
                if len(t) != len(args) or any(not 0 <= e < sizes[s] for e, s in zip(t, args)):
                    raise SpecificationError("relation %r holds on ill-sorted tuple %r" % (n, t))
        for (n, args, res), table in zip(v.functions, self.funcs):
            if len(table) != len(table_points(args, sizes)):
                raise SpecificationError("function %r is not total" % n)
            if any(not 0 <= e < sizes[res] for e in table):
                raise SpecificationError("function %r takes a value outside %r" % (n, res))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Structure):
            return NotImplemented
        return (self._hash == other._hash and self.consts == other.consts and self.rels == other.rels
                and self.funcs == other.funcs and self.vocab == other.vocab and self.sizes == other.sizes)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "Structure(%s)" % describe(self)

    # accessors --------------------------------------------------------------
    def const(self, name: str) -> int:
        return self.consts[self.vocab.const_index[name]]

    def rel(self, name: str) -> FrozenSet[tuple]:
        return self.rels[self.vocab.rel_index[name]]

    def func(self, name: str, args: Sequence[int]) -> int:
        i = self.vocab.func_index[name]
        strides = table_strides(self.vocab.functions[i][1], self.sizes)
        return self.funcs[i][sum(a * k for a, k in zip(args, strides))]

    def func_graph(self, name: str) -> FrozenSet[tuple]:
        i = self.vocab.func_index[name]
        pts = table_points(self.vocab.functions[i][1], self.sizes)
        return frozenset(p + (v,) for p, v in zip(pts, self.funcs[i]))

    def domain(self, sort: str) -> range:
        return range(self.sizes[sort])

    def replace(self, consts: Mapping[str, int] = None, rels: Mapping[str, Iterable[tuple]] = None,
                funcs: Mapping[str, Mapping[tuple, int]] = None) -> "Structure":
        """Copy with some symbol interpretations changed (function updates are pointwise)."""
        v = self.vocab
        c = list(self.consts)
        for n, val in (consts or {}).items():
            c[v.const_index[n]] = val
        r = list(self.rels)
        for n, val in (rels or {}).items():
            r[v.rel_index[n]] = frozenset(tuple(t) for t in val)
        f = list(self.funcs)
        for n, upd in (funcs or {}).items():
            i = v.func_index[n]
            strides = table_strides(v.functions[i][1], self.sizes)
            table = list(f[i])
            for args, val in upd.items():
                table[sum(a * k for a, k in zip(args, strides))] = val
            f[i] = tuple(table)
        return Structure(v, self.sizes, tuple(c), tuple(r), tuple(f))


def _missing(name, point):
    raise SpecificationError("function %r undefined at %r" % (name, point))


def element_name(sort: str, e: int) -> str:
    return "%s%d" % (sort, e)


def describe(s: Structure, skip_static: bool = True) -> str:
    """Compact human readable rendering used by trace dumps."""
    return " ".join(describe_parts(s, skip_static))


def describe_parts(s: Structure, skip_static: bool = True) -> List[str]:
    """One ``name=value`` item per symbol."""
    v = s.vocab
    parts = []
    for (n, sort), val in zip(v.constants, s.consts):
        if skip_static and n in v.static:
            continue
        parts.append("%s=%s" % (n, element_name(sort, val)))
    for (n, args), tuples in zip(v.relations, s.rels):
        if skip_static and n in v.static:
            continue
        if not args:
            parts.append(n if tuples else "~" + n)
        else:
            items = ",".join("(%s)" % ",".join(element_name(a, e) for a, e in zip(args, t)) for t in sorted(tuples))
            parts.append("%s={%s}" % (n, items))
    for (n, args, res), table in zip(v.functions, s.funcs):
        if skip_static and n in v.static:
            continue
        pts = table_points(args, s.sizes)
        items = ",".join("%s:%s" % (",".join(element_name(a, e) for a, e in zip(args, p)), element_name(res, val))
                         for p, val in zip(pts, table))
        parts.append("%s={%s}" % (n, items))
    return parts


def joint(pre: Structure, post: Structure) -> Structure:
    """The structure ``(s, s')`` over ``Σ ⊎ Σ'`` used to evaluate transition formulas."""
    if pre.vocab != post.vocab or pre.sizes != post.sizes:
        raise SpecificationError("joint structure needs equal vocabularies and domains")
    v = pre.vocab
    jv = joint_vocabulary(v)
    return Structure(jv, pre.sizes, pre.consts + post.consts, pre.rels + post.rels, pre.funcs + post.funcs)


_JOINT_CACHE: Dict[Vocabulary, Vocabulary] = {}


def joint_vocabulary(v: Vocabulary) -> Vocabulary:
    jv = _JOINT_CACHE.get(v)
    if jv is None:
        p = lambda n: n + "'"
        jv = Vocabulary(v.sorts,
                        list(v.relations) + [(p(n), a) for n, a in v.relations],
                        list(v.functions) + [(p(n), a, r) for n, a, r in v.functions],
                        list(v.constants) + [(p(n), s) for n, s in v.constants],
                        v.static, v.interpreted)
        _JOINT_CACHE[v] = jv
    return jv


# ----------------------------------------------------------------- sorting

def sort_of(t: Term, vocab: Vocabulary) -> str:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        name = unprime(t.name)
        if name not in vocab.const_index:
            raise SortError("unknown constant %r" % t.name)
        return vocab.const_sort(name)
    if isinstance(t, App):
        name = unprime(t.func)
        if name not in vocab.func_index:
            raise SortError("unknown function %r" % t.func)
        args, res = vocab.signature(name)
        if len(args) != len(t.args):
            raise SortError("function %r expects %d arguments, got %d" % (t.func, len(args), len(t.args)))
        for a, s in zip(t.args, args):
            got = sort_of(a, vocab)
            if got != s:
                raise SortError("argument %s of %s has sort %s, expected %s" % (a, t.func, got, s))
        return res
    raise TypeError(t)


def check_formula(f: Formula, vocab: Vocabulary, allow_temporal: bool = True, allow_primed: bool = False) -> None:
    """Raise :class:`SortError` unless ``f`` is well sorted over ``vocab``."""

    def chk_name(n: str) -> None:
        if is_primed(n) and not allow_primed:
            raise SortError("primed symbol %r not allowed here" % n)

    def walk(g: Formula) -> None:
        if isinstance(g, Bool):
            return
        if isinstance(g, Rel):
            chk_name(g.name)
            name = unprime(g.name)
            if name not in vocab.rel_index:
                raise SortError("unknown relation %r" % g.name)
            args = vocab.relations[vocab.rel_index[name]][1]
            if len(args) != len(g.args):
                raise SortError("relation %r expects %d arguments, got %d" % (g.name, len(args), len(g.args)))
            for a, s in zip(g.args, args):
                _names(a)
                got = sort_of(a, vocab)
                if got != s:
                    raise SortError("argument %s of %s has sort %s, expected %s" % (a, g.name, got, s))
            return
        if isinstance(g, Eq):
            _names(g.lhs)
            _names(g.rhs)
            a, b = sort_of(g.lhs, vocab), sort_of(g.rhs, vocab)
            if a != b:
                raise SortError("equality between sorts %s and %s in %s" % (a, b, g))
            return
        if isinstance(g, (Globally, Eventually)) and not allow_temporal:
            raise SortError("temporal operator in first-order context: %s" % g)
        if isinstance(g, (Exists, Forall)):
            for v in g.vars:
                if v.sort not in vocab.sorts:
                    raise SortError("variable %s has undeclared sort %r" % (v.name, v.sort))
        for c in _kids(g):
            walk(c)

    def _names(t: Term) -> None:
        if isinstance(t, Const):
            chk_name(t.name)
        elif isinstance(t, App):
            chk_name(t.func)
            for a in t.args:
                _names(a)

    walk(f)


def _kids(f: Formula):
    from .syntax import children
    return children(f)


# -------------------------------------------------------------- evaluation

Assignment = Mapping[Var, int]


def evaluate(s: Structure, f: Formula, sigma: Optional[Assignment] = None, post: Optional[Structure] = None) -> bool:
    """Tarskian truth of ``f`` in ``s`` under ``sigma``.

    Primed symbols are read from ``post`` when given (so ``evaluate(s, tau,
    post=t)`` is the satisfaction of ``tau`` by the joint structure).
    """
    env = dict(sigma or {})

    def structure_for(name: str) -> Tuple[Structure, str]:
        if is_primed(name):
            if post is None:
                raise SpecificationError("primed symbol %r without a post-state" % name)
            return post, unprime(name)
        return s, name

    def term(t: Term) -> int:
        if isinstance(t, Var):
            if t not in env:
                raise SpecificationError("unbound variable %s" % t.name)
            return env[t]
        if isinstance(t, Const):
            st, n = structure_for(t.name)
            if n not in st.vocab.const_index:
                raise SpecificationError("unknown constant %r" % t.name)
            return st.consts[st.vocab.const_index[n]]
        if isinstance(t, App):
            st, n = structure_for(t.func)
            if n not in st.vocab.func_index:
                raise SpecificationError("unknown function %r" % t.func)
            return st.func(n, [term(a) for a in t.args])
        raise TypeError(t)

    def ev(g: Formula) -> bool:
        if isinstance(g, Bool):
            return g.value
        if isinstance(g, Rel):
            st, n = structure_for(g.name)
            if n not in st.vocab.rel_index:
                raise SpecificationError("unknown relation %r" % g.name)
            return tuple(term(a) for a in g.args) in st.rels[st.vocab.rel_index[n]]
        if isinstance(g, Eq):
            return term(g.lhs) == term(g.rhs)
        if isinstance(g, Not):
            return not ev(g.body)
        if isinstance(g, Or):
            return any(ev(a) for a in g.args)
        if isinstance(g, And):
            return all(ev(a) for a in g.args)
        if isinstance(g, Implies):
            return (not ev(g.lhs)) or ev(g.rhs)
        if isinstance(g, Iff):
            return ev(g.lhs) == ev(g.rhs)
        if isinstance(g, (Exists, Forall)):
            want = isinstance(g, Exists)
            saved = {v: env[v] for v in g.vars if v in env}
            try:
                for vals in itertools.product(*(range(s.sizes[v.sort]) for v in g.vars)):
                    env.update(zip(g.vars, vals))
                    if ev(g.body) == want:
                        return want
                return not want
            finally:
                for v in g.vars:
                    env.pop(v, None)
                env.update(saved)
        if isinstance(g, (Globally, Eventually)):
            raise SpecificationError("temporal formula %s cannot be evaluated on a single state" % g)
        raise TypeError(g)

    return ev(f)


# --------------------------------------------------- projection/restriction

class PartialStructure:
    """A structure projected to a sub-domain: constants may be undefined
    (``None``) and function graphs partial."""

    __slots__ = ("vocab", "domain", "consts", "rels", "graphs", "_hash")

    def __init__(self, vocab: Vocabulary, domain: Tuple[FrozenSet[int], ...], consts: Tuple[Optional[int], ...],
                 rels: Tuple[FrozenSet[tuple], ...], graphs: Tuple[FrozenSet[tuple], ...]):
        self.vocab = vocab
        self.domain = domain
        self.consts = consts
        self.rels = rels
        self.graphs = graphs
        self._hash = hash((domain, consts, rels, graphs))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialStructure):
            return NotImplemented
        return (self._hash == other._hash and self.domain == other.domain and self.consts == other.consts
                and self.rels == other.rels and self.graphs == other.graphs and self.vocab == other.vocab)

    def __hash__(self) -> int:
        return self._hash

    def const(self, name: str) -> Optional[int]:
        return self.consts[self.vocab.const_index[name]]

    def rel(self, name: str) -> FrozenSet[tuple]:
        return self.rels[self.vocab.rel_index[name]]

    def func_graph(self, name: str) -> FrozenSet[tuple]:
        return self.graphs[self.vocab.func_index[name]]

    def __repr__(self) -> str:
        return "PartialStructure(domain=%r, consts=%r)" % (self.domain, self.consts)


DomainSubset = Mapping[str, Iterable[int]]


def _domain_tuple(vocab: Vocabulary, D: DomainSubset) -> Tuple[FrozenSet[int], ...]:
    return tuple(frozenset(D.get(s, ())) for s in vocab.sorts)


def project(s: Structure, D: DomainSubset) -> PartialStructure:
    """Project ``s`` to the per-sort element subset ``D``."""
    v = s.vocab
    dom = _domain_tuple(v, D)
    for sort, keep in zip(v.sorts, dom):
        if any(not 0 <= e < s.sizes[sort] for e in keep):
            raise SpecificationError("projection domain for %r is not a subset of the structure's domain" % sort)
    by_sort = dict(zip(v.sorts, dom))
    consts = tuple(val if val in by_sort[sort] else None for (_, sort), val in zip(v.constants, s.consts))
    rels = tuple(
        tuples if not args else frozenset(t for t in tuples if all(e in by_sort[a] for e, a in zip(t, args)))
        for (_, args), tuples in zip(v.relations, s.rels))
    graphs = []
    for (name, args, res), table in zip(v.functions, s.funcs):
        pts = table_points(args, s.sizes)
        keep = [by_sort[a] for a in args]
        rk = by_sort[res]
        graphs.append(frozenset(p + (val,) for p, val in zip(pts, table)
                                if val in rk and all(e in k for e, k in zip(p, keep))))
    return PartialStructure(v, dom, consts, rels, tuple(graphs))


def as_partial(s: Structure) -> PartialStructure:
    return project(s, {sort: range(s.sizes[sort]) for sort in s.vocab.sorts})


def partial_equal(p: PartialStructure, q: PartialStructure) -> bool:
    """Equality of two projections over the same vocabulary and sub-domain."""
    if p.vocab != q.vocab:
        raise SpecificationError("partial structures over different vocabularies")
    if p.domain != q.domain:
        raise SpecificationError("partial structures over different sub-domains")
    return p.consts == q.consts and p.rels == q.rels and p.graphs == q.graphs


def restrict(s: Structure, sub: Vocabulary) -> Structure:
    """Keep only the interpretation of the symbols of ``sub``."""
    if not sub.is_subvocabulary_of(s.vocab):
        raise SpecificationError("%r is not a sub-vocabulary of %r" % (sub, s.vocab))
    v = s.vocab
    consts = tuple(s.consts[v.const_index[n]] for n, _ in sub.constants)
    rels = tuple(s.rels[v.rel_index[n]] for n, _ in sub.relations)
    funcs = tuple(s.funcs[v.func_index[n]] for n, _, _ in sub.functions)
    sizes = {k: s.sizes[k] for k in sub.sorts}
    return Structure(sub, sizes, consts, rels, funcs)


# ------------------------------------------------------------ interpretations

def all_interpretations(vocab: Vocabulary, name: str, sizes: Mapping[str, int]) -> Iterator[object]:
    """Every interpretation of one symbol (as stored inside a Structure)."""
    kind = vocab.kind(name)
    args, res = vocab.signature(name)
    if kind == "constant":
        yield from range(sizes[res])
    elif kind == "relation":
        pts = table_points(args, sizes)
        for bits in itertools.product((False, True), repeat=len(pts)):
            yield frozenset(p for p, b in zip(pts, bits) if b)
    else:
        pts = table_points(args, sizes)
        yield from itertools.product(range(sizes[res]), repeat=len(pts))


def all_structures(vocab: Vocabulary, sizes: Mapping[str, int]) -> Iterator[Structure]:
    """Brute-force enumeration of every structure (small vocabularies only)."""
    names = vocab.dynamic_names()
    base = Structure.build(vocab, sizes, {n: 0 for n, _ in vocab.constants},
                           funcs={n: tuple([0] * len(table_points(a, sizes))) for n, a, _ in vocab.functions},
                           validate=False)
    choices = [list(all_interpretations(vocab, n, sizes)) for n in names]
    for combo in itertools.product(*choices):
        c, r, f = list(base.consts), list(base.rels), list(base.funcs)
        for n, val in zip(names, combo):
            k = vocab.kind(n)
            if k == "constant":
                c[vocab.const_index[n]] = val
            elif k == "relation":
                r[vocab.rel_index[n]] = val
            else:
                f[vocab.func_index[n]] = val
        yield Structure(vocab, sizes, tuple(c), tuple(r), tuple(f))


# ------------------------------------------------------------ compilation

Compiled = Callable[[object, object, list], bool]


class Compiler:
    """Compile formulas into closures ``fn(pre, post, env) -> bool``.

    This is the evaluator used on hot paths; :func:`evaluate` is the
    independent interpretive reference.  ``pre``/``post`` only need
    ``consts``/``rels``/``funcs`` attributes laid out per ``vocab``.
    """

    def __init__(self, vocab: Vocabulary, sizes: Mapping[str, int]):
        self.vocab = vocab
        self.sizes = dict(sizes)
        self.nslots = 0

    def compile(self, f: Formula, slots: Optional[Mapping[Var, int]] = None) -> Compiled:
        slots = dict(slots or {})
        self.nslots = max([self.nslots] + [i + 1 for i in slots.values()])
        return self._f(f, slots)

    def compile_term(self, t: Term, slots: Optional[Mapping[Var, int]] = None):
        slots = dict(slots or {})
        self.nslots = max([self.nslots] + [i + 1 for i in slots.values()])
        return self._t(t, slots)

    def _alloc(self, slots: Dict[Var, int], v: Var) -> int:
        i = max(slots.values(), default=-1) + 1
        slots[v] = i
        self.nslots = max(self.nslots, i + 1)
        return i

    def _t(self, t: Term, slots: Dict[Var, int]):
        v = self.vocab
        if isinstance(t, Var):
            if t not in slots:
                raise SpecificationError("unbound variable %s" % t.name)
            i = slots[t]
            return lambda s, p, env: env[i]
        if isinstance(t, Const):
            name = unprime(t.name)
            if name not in v.const_index:
                raise SpecificationError("unknown constant %r" % t.name)
            i = v.const_index[name]
            if is_primed(t.name):
                return lambda s, p, env: p.consts[i]
            return lambda s, p, env: s.consts[i]
        if isinstance(t, App):
            name = unprime(t.func)
            if name not in v.func_index:
                raise SpecificationError("unknown function %r" % t.func)
            i = v.func_index[name]
            strides = table_strides(v.functions[i][1], self.sizes)
            args = [self._t(a, slots) for a in t.args]
            primed = is_primed(t.func)
            if len(args) == 1:
                a0 = args[0]
                if primed:
                    return lambda s, p, env: p.funcs[i][a0(s, p, env)]
                return lambda s, p, env: s.funcs[i][a0(s, p, env)]

            def app(s, p, env, args=args, strides=strides):
                st = p if primed else s
                return st.funcs[i][sum(a(s, p, env) * k for a, k in zip(args, strides))]
            return app
        raise TypeError(t)

    def _f(self, f: Formula, slots: Dict[Var, int]) -> Compiled:
        v = self.vocab
        if isinstance(f, Bool):
            val = f.value
            return lambda s, p, env: val
        if isinstance(f, Rel):
            name = unprime(f.name)
            if name not in v.rel_index:
                raise SpecificationError("unknown relation %r" % f.name)
            i = v.rel_index[name]
            primed = is_primed(f.name)
            args = [self._t(a, slots) for a in f.args]
            if not args:
                if primed:
                    return lambda s, p, env: bool(p.rels[i])
                return lambda s, p, env: bool(s.rels[i])
            if len(args) == 1:
                a0 = args[0]
                if primed:
                    return lambda s, p, env: (a0(s, p, env),) in p.rels[i]
                return lambda s, p, env: (a0(s, p, env),) in s.rels[i]
            if primed:
                return lambda s, p, env: tuple(a(s, p, env) for a in args) in p.rels[i]
            return lambda s, p, env: tuple(a(s, p, env) for a in args) in s.rels[i]
        if isinstance(f, Eq):
            l, r = self._t(f.lhs, slots), self._t(f.rhs, slots)
            return lambda s, p, env: l(s, p, env) == r(s, p, env)
        if isinstance(f, Not):
            b = self._f(f.body, slots)
            return lambda s, p, env: not b(s, p, env)
        if isinstance(f, Or):
            parts = [self._f(a, slots) for a in f.args]
            if len(parts) == 2:
                a0, a1 = parts
                return lambda s, p, env: a0(s, p, env) or a1(s, p, env)
            return lambda s, p, env: any(a(s, p, env) for a in parts)
        if isinstance(f, And):
            parts = [self._f(a, slots) for a in f.args]
            if len(parts) == 2:
                a0, a1 = parts
                return lambda s, p, env: a0(s, p, env) and a1(s, p, env)
            return lambda s, p, env: all(a(s, p, env) for a in parts)
        if isinstance(f, Implies):
            l, r = self._f(f.lhs, slots), self._f(f.rhs, slots)
            return lambda s, p, env: (not l(s, p, env)) or r(s, p, env)
        if isinstance(f, Iff):
            l, r = self._f(f.lhs, slots), self._f(f.rhs, slots)
            return lambda s, p, env: l(s, p, env) == r(s, p, env)
        if isinstance(f, (Exists, Forall)):
            inner = dict(slots)
            idx = [self._alloc(inner, var) for var in f.vars]
            ranges = [range(self.sizes[var.sort]) for var in f.vars]
            body = self._f(f.body, inner)
            want = isinstance(f, Exists)
            if len(idx) == 1:
                k, rng = idx[0], ranges[0]
                if want:
                    def ex(s, p, env):
                        for e in rng:
                            env[k] = e
                            if body(s, p, env):
                                return True
                        return False
                    return ex

                def fa(s, p, env):
                    for e in rng:
                        env[k] = e
                        if not body(s, p, env):
                            return False
                    return True
                return fa

            def quant(s, p, env):
                for vals in itertools.product(*ranges):
                    for k, e in zip(idx, vals):
                        env[k] = e
                    if body(s, p, env) == want:
                        return want
                return not want
            return quant
        if isinstance(f, (Globally, Eventually)):
            raise SpecificationError("temporal formula %s cannot be compiled to a state predicate" % f)
        raise TypeError(f)


def compile_closed(f: Formula, vocab: Vocabulary, sizes: Mapping[str, int]):
    """Compile a closed formula; returns ``fn(pre, post=None) -> bool``."""
    c = Compiler(vocab, sizes)
    fn = c.compile(f)
    n = c.nslots

    def run(pre, post=None):
        return fn(pre, post, [0] * n)
    return run
