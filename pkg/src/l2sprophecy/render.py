"""Counterexample dumps: plain text, Graphviz DOT and a JSON form that can
be read back and re-validated."""

from __future__ import annotations

import json
from typing import Dict, List, Sequence

from .foltl import LassoTrace
from .l2s import AbstractLassoWitness
from .logic import Structure, Vocabulary, describe_parts, element_name, table_points


def _fp_text(F: Dict[str, frozenset]) -> str:
    return " ".join("%s={%s}" % (s, ",".join(element_name(s, e) for e in sorted(F[s]))) for s in sorted(F))


def _segment(w: AbstractLassoWitness, x: int) -> str:
    if x <= w.i:
        return "prefix"
    if x < w.j:
        return "frozen"
    return "loop"


def _states_text(states: Sequence[Structure], tags: Sequence[str]) -> List[str]:
    """First state in full, later ones as changes against their predecessor."""
    lines = []
    prev = None
    for x, (s, tag) in enumerate(zip(states, tags)):
        parts = describe_parts(s)
        if prev is None:
            lines.append("state %d [%s]" % (x, tag))
            lines += ["  " + p for p in parts]
        else:
            changed = [p for p, q in zip(parts, prev) if p != q]
            lines.append("state %d [%s]%s" % (x, tag, "" if changed else " (no change)"))
            lines += ["  " + p for p in changed]
        prev = parts
    return lines


def lasso_text(w: AbstractLassoWitness, title: str = "abstract lasso") -> str:
    lines = ["%s: freeze i=%d, save j=%d, repeat k=%d" % (title, w.i, w.j, w.k),
             "fp(s0): " + _fp_text(w.fp0),
             "frozen domain f(pi,i): " + _fp_text(w.fp_i),
             "loop domain f(pi,j): " + _fp_text(w.fp_j)]
    lines += _states_text(w.trace, [_segment(w, x) for x in range(len(w.trace))])
    for seg in ("prefix", "loop"):
        ev = w.evidence.get(seg, {})
        if ev:
            lines.append("fairness met in %s:" % seg)
            for (box, args), at in sorted(ev.items()):
                lines.append("  %s%s at %d" % (box, args, at))
    return "\n".join(lines) + "\n"


def _dot_label(s: Structure, head: str) -> str:
    items = [head] + describe_parts(s)
    return "\\l".join(x.replace("\\", "\\\\").replace('"', '\\"') for x in items) + "\\l"


def lasso_dot(w: AbstractLassoWitness) -> str:
    out = ["digraph lasso {", "  node [shape=box, fontname=monospace, fontsize=9];"]
    names = {"prefix": "pre-freeze", "frozen": "frozen", "loop": "saved loop"}
    for seg in ("prefix", "frozen", "loop"):
        xs = [x for x in range(len(w.trace)) if _segment(w, x) == seg]
        if not xs:
            continue
        out.append('  subgraph cluster_%s {' % seg)
        out.append('    label="%s";' % names[seg])
        for x in xs:
            tag = "s%d" % x + (" (freeze)" if x == w.i else "") + (" (saved)" if x == w.j else "") \
                + (" (repeat)" if x == w.k else "")
            out.append('    s%d [label="%s"];' % (x, _dot_label(w.trace[x], tag)))
        out.append("  }")
    for x in range(len(w.trace) - 1):
        out.append("  s%d -> s%d;" % (x, x + 1))
    out.append("  { rank=same; s%d; s%d; }" % (w.j, w.k))
    out.append('  s%d -> s%d [style=dashed, label="equal on l2s_a"];' % (w.k, w.j))
    out.append("}")
    return "\n".join(out) + "\n"


def fair_lasso_text(pi: LassoTrace) -> str:
    tags = ["stem"] * len(pi.stem) + ["loop"] * len(pi.loop)
    lines = ["fair lasso: stem %d, loop %d" % (len(pi.stem), len(pi.loop))]
    lines += _states_text(pi.states, tags)
    lines.append("loop returns to state %d" % len(pi.stem))
    return "\n".join(lines) + "\n"


def fair_lasso_dot(pi: LassoTrace) -> str:
    out = ["digraph fair_lasso {", "  node [shape=box, fontname=monospace, fontsize=9];"]
    for x, s in enumerate(pi.states):
        out.append('  s%d [label="%s"];' % (x, _dot_label(s, "s%d" % x)))
    for x in range(len(pi.states) - 1):
        out.append("  s%d -> s%d;" % (x, x + 1))
    out.append("  s%d -> s%d;" % (len(pi.states) - 1, len(pi.stem)))
    out.append("}")
    return "\n".join(out) + "\n"


def cti_text(c) -> str:
    lines = ["counterexample to induction: " + c.describe(), "pre-state:"]
    lines += ["  " + p for p in describe_parts(c.state)]
    if c.post is not None:
        lines.append("post-state:")
        lines += ["  " + p for p in describe_parts(c.post)]
    return "\n".join(lines) + "\n"


def cti_dot(c) -> str:
    out = ["digraph cti {", "  node [shape=box, fontname=monospace, fontsize=9];",
           '  pre [label="%s"];' % _dot_label(c.state, "pre (%s)" % c.vc)]
    if c.post is not None:
        out.append('  post [label="%s"];' % _dot_label(c.post, "post, violates %s" % c.conjecture))
        out.append("  pre -> post;")
    out.append("}")
    return "\n".join(out) + "\n"


# -------------------------------------------------------------------- json

def structure_to_json(s: Structure) -> dict:
    v = s.vocab
    return {
        "sizes": dict(s.sizes),
        "constants": {n: s.const(n) for n, _ in v.constants if n not in v.interpreted},
        "relations": {n: sorted(list(t) for t in s.rel(n)) for n, _ in v.relations if n not in v.interpreted},
        "functions": {n: [[list(p), s.func(n, p)] for p in table_points(a, s.sizes)] for n, a, _ in v.functions},
    }


def structure_from_json(d: dict, vocab: Vocabulary) -> Structure:
    funcs = {n: {tuple(p): val for p, val in rows} for n, rows in d["functions"].items()}
    return Structure.build(vocab, d["sizes"], d["constants"],
                           {n: [tuple(t) for t in ts] for n, ts in d["relations"].items()}, funcs)


def _fp_lists(F):
    return {k: sorted(x) for k, x in F.items()}


def witness_to_json(w: AbstractLassoWitness) -> str:
    fp = _fp_lists
    return json.dumps({"i": w.i, "j": w.j, "k": w.k, "fp0": fp(w.fp0), "fp_i": fp(w.fp_i), "fp_j": fp(w.fp_j),
                       "trace": [structure_to_json(s) for s in w.trace]}, indent=1, sort_keys=True)


def witness_from_json(text: str, vocab: Vocabulary) -> AbstractLassoWitness:
    d = json.loads(text)
    def fp(F):
        return {k: frozenset(x) for k, x in F.items()}
    trace = tuple(structure_from_json(s, vocab) for s in d["trace"])
    return AbstractLassoWitness(trace, d["i"], d["j"], d["k"], fp(d["fp0"]), fp(d["fp_i"]), fp(d["fp_j"]))

