"""Random small systems, formulas and lasso traces for property testing."""

from __future__ import annotations

import random
from typing import List, Optional, Sequence, Tuple

from .foltl import LassoTrace
from .logic import Structure, Vocabulary, all_structures
from .syntax import (
    TRUE, And, Const, Eq, Eventually, Exists, Forall, Formula, Globally, Iff, Implies, Not, Or, Rel, Var, conj, free_vars,
)
from .ts import TransitionSystem

SORT = "e"


def toy_vocab(unary: int = 2, nullary: int = 0, constant: bool = True) -> Vocabulary:
    rels = [("p%d" % i, (SORT,)) for i in range(unary)] + [("b%d" % i, ()) for i in range(nullary)]
    consts = [("k", SORT)] if constant else []
    return Vocabulary([SORT], relations=rels, constants=consts)


X = Var("X", SORT)

# update rules for a unary relation r (o is another relation or r itself)
RULES = ("keep", "flip", "set", "clear", "copy", "negcopy", "grow", "any")
INITS = ("none", "all", "any")


def _rule(rule: str, r: str, o: str) -> Formula:
    post = Rel(r + "'", (X,))
    now = Rel(r, (X,))
    other = Rel(o, (X,))
    body = {
        "keep": Iff(post, now),
        "flip": Iff(post, Not(now)),
        "set": post,
        "clear": Not(post),
        "copy": Iff(post, other),
        "negcopy": Iff(post, Not(other)),
        "grow": Implies(now, post),
        "any": TRUE,
    }[rule]
    return Forall((X,), body)


def _nullary_rule(rule: str, b: str) -> Formula:
    post, now = Rel(b + "'"), Rel(b)
    return {"keep": Iff(post, now), "flip": Iff(post, Not(now)), "set": post, "clear": Not(post),
            "copy": Iff(post, now), "negcopy": Iff(post, Not(now)), "grow": Implies(now, post), "any": TRUE}[rule]


def template_system(vocab: Vocabulary, inits: Sequence[str], rules: Sequence[str],
                    others: Optional[Sequence[str]] = None, const_moves: bool = False,
                    name: str = "toy") -> TransitionSystem:
    """One init choice and one update rule per relation (in declaration order)."""
    rels = [n for n, _ in vocab.relations]
    others = list(others) if others is not None else [rels[(i + 1) % len(rels)] for i in range(len(rels))]
    init, trans = [], []
    for (n, args), ini, rule, o in zip(vocab.relations, inits, rules, others):
        if args:
            atom = Rel(n, (X,))
            if ini == "none":
                init.append(Forall((X,), Not(atom)))
            elif ini == "all":
                init.append(Forall((X,), atom))
            trans.append(_rule(rule, n, o if vocab.signature(o)[0] else n))
        else:
            if ini == "none":
                init.append(Not(Rel(n)))
            elif ini == "all":
                init.append(Rel(n))
            trans.append(_nullary_rule(rule, n))
    for c, _ in vocab.constants:
        if not const_moves:
            trans.append(Eq(Const(c + "'"), Const(c)))
    return TransitionSystem(vocab, conj(*init), conj(*trans), name)


def random_system(rng: random.Random, vocab: Vocabulary) -> TransitionSystem:
    rels = [n for n, _ in vocab.relations]
    return template_system(vocab, [rng.choice(INITS) for _ in rels], [rng.choice(RULES) for _ in rels],
                           [rng.choice(rels) for _ in rels], const_moves=rng.random() < 0.2)


def _atoms(vocab: Vocabulary, bound: Sequence[Var]) -> List[Formula]:
    out = []
    terms = list(bound) + [Const(c) for c, _ in vocab.constants]
    for n, args in vocab.relations:
        if not args:
            out.append(Rel(n))
        else:
            out.extend(Rel(n, (t,)) for t in terms)
    return out


def random_formula(rng: random.Random, vocab: Vocabulary, tdepth: int = 2, size: int = 4,
                   bound: Sequence[Var] = (), quantifiers: bool = True) -> Formula:
    """A closed (given ``bound``) FO-LTL formula with at most ``tdepth`` nested temporal operators."""
    if size <= 1:
        return rng.choice(_atoms(vocab, bound))
    ops = ["not", "and", "or", "implies"]
    if tdepth > 0:
        ops += ["globally", "eventually"] * 2
    if quantifiers and not bound:
        ops += ["forall", "exists"]
    op = rng.choice(ops)
    if op == "not":
        return Not(random_formula(rng, vocab, tdepth, size - 1, bound, quantifiers))
    if op in ("and", "or", "implies"):
        k = rng.randint(1, size - 1)
        a = random_formula(rng, vocab, tdepth, k, bound, quantifiers)
        b = random_formula(rng, vocab, tdepth, size - k, bound, quantifiers)
        if op == "and":
            return And((a, b))
        return Or((a, b)) if op == "or" else Implies(a, b)
    if op in ("globally", "eventually"):
        body = random_formula(rng, vocab, tdepth - 1, size - 1, bound, quantifiers)
        return Globally(body) if op == "globally" else Eventually(body)
    v = Var("Y", SORT)
    body = random_formula(rng, vocab, tdepth, size - 1, tuple(bound) + (v,), quantifiers)
    return Forall((v,), body) if op == "forall" else Exists((v,), body)


def random_open_formula(rng: random.Random, vocab: Vocabulary, tdepth: int = 2, size: int = 3) -> Tuple[Formula, Var]:
    """A temporal formula with exactly one free variable (for witnesses)."""
    v = Var("Z", SORT)
    while True:
        f = random_formula(rng, vocab, tdepth, size, (v,), quantifiers=False)
        if free_vars(f) == {v}:
            return f, v


def random_lasso(rng: random.Random, vocab: Vocabulary, sizes, max_stem: int = 2, max_loop: int = 3,
                 pool: Optional[List[Structure]] = None) -> LassoTrace:
    pool = pool if pool is not None else list(all_structures(vocab, sizes))
    stem = tuple(rng.choice(pool) for _ in range(rng.randint(0, max_stem)))
    loop = tuple(rng.choice(pool) for _ in range(rng.randint(1, max_loop)))
    return LassoTrace(stem, loop)
