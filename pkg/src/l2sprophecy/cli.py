"""Command line driver.

    l2sprophecy check --mode lasso-search --model ticket --bounds thread=2,number=5
    l2sprophecy check --mode invariant --model counter-loop
    l2sprophecy list

Exit status: 0 established at the bound (or invariant holds), 1 a
counterexample was written, 2 inconclusive (budget), 10 and up for
usage and input errors.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from typing import Dict, List, Optional

from . import checker
from .corpus import _TABLE, CORPUS_DIR, corpus_names
from .explicit import ENGINES
from .l2s import (
    ProphecySpec, build_monitor, build_witness_system, mine_prophecy, parse_invariant, parse_prophecy, resolve_invariant,
)
from .logic import SortError, SpecificationError
from .parser import SortMismatch, load_model, load_property
from .render import cti_dot, cti_text, fair_lasso_dot, fair_lasso_text, lasso_dot, lasso_text, witness_from_json, \
    witness_to_json
from .sexpr import ParseError
from .syntax import And, Implies, Or
from .tableau import UnhousedSubformula, find_fair_lasso, product_system
from .ts import ResourceLimit

MODES = ("lasso-search", "invariant", "fair-lasso", "export-vc", "closure-test")

EXIT_OK, EXIT_CEX, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_PARSE, EXIT_SORT, EXIT_UNHOUSED, EXIT_SPEC, EXIT_IO = 10, 11, 12, 13, 14, 15


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        sys.exit(EXIT_USAGE)


def parse_bounds(text: str) -> Dict[str, int]:
    out = {}
    for item in filter(None, (x.strip() for x in text.split(","))):
        if "=" not in item:
            raise UsageError("bad bound %r, expected sort=size" % item)
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = int(v)
        except ValueError:
            raise UsageError("bad size in bound %r" % item)
    return out


def _resolve(arg: Optional[str], kind: str, model_name: Optional[str]) -> Optional[str]:
    """A path, or a corpus entry name (``ticket``, ``ticket.prophecy``)."""
    if arg is None:
        if model_name and kind != "prophecy":
            p = os.path.join(CORPUS_DIR, "%s.%s" % (model_name, kind))
            return p if os.path.exists(p) else None
        return None
    if os.path.exists(arg):
        return arg
    base = arg.split(".", 1)[0]
    for cand in (os.path.join(CORPUS_DIR, arg), os.path.join(CORPUS_DIR, "%s.%s" % (base, kind))):
        if os.path.exists(cand):
            return cand
    raise FileNotFoundError(arg)


def _read(p: str) -> str:
    with open(p) as fh:
        return fh.read()


class Run:
    """Everything one ``check`` invocation needs, loaded from files."""

    def __init__(self, args):
        self.args = args
        corpus = args.model if args.model in _TABLE and not os.path.exists(args.model) else None
        self.model_path = _resolve(args.model, "model", None)
        self.model = load_model(_read(self.model_path), self.model_path)
        prop = _resolve(args.property, "property", corpus)
        if prop is None:
            raise UsageError("no property given (--property)")
        self.goal = load_property(_read(prop), self.model.vocab, prop)
        self.spec = ProphecySpec()
        proph = _resolve(args.prophecy, "prophecy", corpus)
        if proph:
            self.spec = parse_prophecy(_read(proph), self.model.vocab, proph)
        self.inv_path = _resolve(args.invariant, "invariant", corpus if args.mode in ("invariant", "export-vc")
                                 else None)
        defaults = _TABLE.get(corpus, ({}, 40, {}, True)) if corpus else ({}, 40, {}, True)
        self.bounds = dict(defaults[0])
        if args.bounds:
            self.bounds.update(parse_bounds(args.bounds))
        self.maxlen = args.maxlen if args.maxlen is not None else defaults[1]
        missing = [s for s in self.model.vocab.sorts if s not in self.bounds]
        if missing:
            raise UsageError("no bound for sort%s %s (use --bounds)" % ("s" if len(missing) > 1 else "",
                                                                          ", ".join(missing)))
        extra = [s for s in self.bounds if s not in self.model.vocab.sorts]
        if extra:
            raise UsageError("bound for unknown sort %s" % ", ".join(extra))
        os.makedirs(args.out, exist_ok=True)

    def out(self, name: str, text: str) -> str:
        p = os.path.join(self.args.out, name)
        with open(p, "w") as fh:
            fh.write(text)
        return p

    @property
    def hooks(self):
        return self.model.hooks


def _say(*a):
    print(*a, flush=True)


def mode_lasso_search(r: Run) -> int:
    W = build_witness_system(r.model.system, r.goal, r.spec)
    A, B = r.spec.counts(r.goal)
    _say("goal: %s" % r.goal)
    _say("prophecy: #A=%d #B=%d, %d boxes, bounds %s, maxlen %d" % (A, B, len(W.artifacts.boxes),
                                                                    r.bounds, r.maxlen))
    res = checker.search_abstract_lasso(W, r.bounds, r.maxlen, r.hooks, r.args.node_budget,
                                        r.args.time_budget, r.args.engine)
    if res.stats:
        _say("explored %d monitor states, depth %d, %.1fs" % (res.stats.states, res.stats.depth, res.stats.seconds))
    _say("verdict: %s%s" % (res.verdict, " (%s)" % res.reason if res.reason else ""))
    if res.verdict == checker.LASSO:
        w = res.witness
        paths = [r.out("lasso.txt", lasso_text(w)), r.out("lasso.dot", lasso_dot(w)),
                 r.out("lasso.json", witness_to_json(w))]
        back = witness_from_json(_read(paths[2]), W.vocab)
        problems = checker.validate_witness(back, W, r.hooks)
        if problems:
            raise checker.InvalidWitness("; ".join(problems))
        _say("i=%d j=%d k=%d; wrote %s (re-validated)" % (w.i, w.j, w.k, ", ".join(paths)))
    elif res.verdict == checker.NO_LASSO and res.stats and not res.stats.exhausted:
        _say("note: search stopped at maxlen with states left to explore")
    return res.exit_code


def _invariant(r: Run):
    if not r.inv_path:
        raise UsageError("no invariant given (--invariant)")
    inv = parse_invariant(_read(r.inv_path), r.model.vocab, r.inv_path)
    spec = mine_prophecy(inv, r.goal).merged(r.spec)
    W = build_witness_system(r.model.system, r.goal, spec)
    mon = build_monitor(W, hooks=r.hooks)
    return mon, resolve_invariant(inv, mon)


def mode_invariant(r: Run) -> int:
    mon, conjs = _invariant(r)
    _say("%d conjectures over %d monitor symbols" % (len(conjs), len(mon.vocab.symbol_names())))
    res = checker.check_inductive_invariant(mon, conjs, r.bounds, node_budget=r.args.node_budget)
    _say("verdict: %s (%d structures checked, all sizes up to %s)%s"
         % (res.verdict, res.checked, res.bound, " " + res.reason if res.reason else ""))
    if res.verdict == checker.CTI:
        _say(res.cti.describe())
        if not checker.cti_is_valid(mon, conjs, res.cti):
            raise AssertionError("reported CTI does not falsify its VC")
        _say("wrote %s, %s" % (r.out("cti.txt", cti_text(res.cti)), r.out("cti.dot", cti_dot(res.cti))))
    return res.exit_code


def mode_export(r: Run) -> int:
    if r.inv_path:
        mon, conjs = _invariant(r)
    else:
        mon, conjs = build_monitor(build_witness_system(r.model.system, r.goal, r.spec), hooks=r.hooks), []
    files = checker.export_vcs(mon, conjs, r.args.out)
    for fn in files:
        _say("wrote %s" % os.path.join(r.args.out, fn))
    return EXIT_OK


def mode_fair_lasso(r: Run) -> int:
    P, t = product_system(r.model.system, r.goal, r.spec.closure(r.goal))
    pi = find_fair_lasso(P, t, r.bounds)
    if pi is None:
        _say("verdict: no fair lasso at bounds %s" % r.bounds)
        return EXIT_OK
    _say("verdict: fair lasso found (the goal fails)")
    _say("wrote %s, %s" % (r.out("fair-lasso.txt", fair_lasso_text(pi)), r.out("fair-lasso.dot", fair_lasso_dot(pi))))
    return EXIT_CEX


def mode_closure(args) -> int:
    """Random premise/conclusion instances on small generated systems.

    Each round draws a system and two goals g1, g2 and asks whether
    (g1, A1, B1) and (g2, A2, B2) with no lasso imply no lasso for
    g1 & g2, g1 | chi and g2 under the union of the prophecy."""
    from .randgen import random_formula, random_system, toy_vocab
    rng = random.Random(args.seed)
    voc = toy_vocab(unary=2)
    sizes = parse_bounds(args.bounds) if args.bounds else {"e": 2}
    maxlen = args.maxlen if args.maxlen is not None else 8
    bad = applicable = 0
    for k in range(args.rounds):
        S = random_system(rng, voc)
        g1, g2, chi = (random_formula(rng, voc, 2, 3) for _ in range(3))
        goals, psi = [([g1, g2], And((g1, g2))), ([g1], Or((g1, chi))), ([g1, Implies(g1, g2)], g2)][k % 3]
        specs = [ProphecySpec([random_formula(rng, voc, 1, 2)]) for _ in goals]
        rep = checker.closure_harness(S, goals, psi, specs, sizes, maxlen, None, args.engine)
        applicable += rep.applicable
        if rep.violation:
            bad += 1
            _say("violation in round %d: goals %s, conclusion %s" % (k, ", ".join(map(str, goals)), psi))
    _say("%d rounds, %d with every premise established, %d violations" % (args.rounds, applicable, bad))
    _say(checker.ClosureReport.note)
    return EXIT_CEX if bad else EXIT_OK


HANDLERS = {"lasso-search": mode_lasso_search, "invariant": mode_invariant, "export-vc": mode_export,
            "fair-lasso": mode_fair_lasso}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="l2sprophecy", description="Liveness-to-safety checking with temporal prophecy.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    c = sub.add_parser("check", help="run one check")
    c.add_argument("--model", help="model file, or a bundled name (%s)" % ", ".join(corpus_names()))
    c.add_argument("--property", help="property file (defaults to the bundled one)")
    c.add_argument("--prophecy", help="prophecy file: (prophecy f) and (witness (c sort) for f) forms")
    c.add_argument("--invariant", help="invariant file for --mode invariant / export-vc")
    c.add_argument("--bounds", help="domain sizes, e.g. thread=2,number=5")
    c.add_argument("--maxlen", type=int, help="longest trace explored (system states)")
    c.add_argument("--mode", choices=MODES, default="lasso-search")
    c.add_argument("--out", default="l2s-out", help="directory for traces and VC files")
    c.add_argument("--node-budget", type=int)
    c.add_argument("--time-budget", type=float, help="seconds")
    c.add_argument("--seed", type=int, default=0, help="seed for closure-test (random toy systems)")
    c.add_argument("--rounds", type=int, default=30, help="closure-test instances")
    c.add_argument("--engine", choices=sorted(ENGINES), default="grouped")
    sub.add_parser("list", help="list bundled models")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    p = build_parser()
    args = p.parse_args(argv)
    if args.cmd == "list":
        for n in corpus_names():
            b, maxlen, exp, ci = _TABLE[n]
            _say("%-13s bounds %s maxlen %d%s" % (n, ",".join("%s=%d" % kv for kv in b.items()), maxlen,
                                                 "" if ci else "  (skeleton, not checked)"))
        return EXIT_OK
    if args.cmd != "check":
        p.print_help()
        return EXIT_USAGE
    try:
        if args.mode == "closure-test":
            return mode_closure(args)
        if not args.model:
            raise UsageError("--model is required for --mode %s" % args.mode)
        r = Run(args)
        return HANDLERS[args.mode](r)
    except UsageError as e:
        print("usage error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except SortMismatch as e:
        print("sort error: %s" % e, file=sys.stderr)
        return EXIT_SORT
    except ParseError as e:
        print("parse error: %s" % e, file=sys.stderr)
        return EXIT_PARSE
    except UnhousedSubformula as e:
        print("unhoused temporal subformula: %s" % e, file=sys.stderr)
        return EXIT_UNHOUSED
    except SortError as e:
        print("sort error: %s" % e, file=sys.stderr)
        return EXIT_SORT
    except SpecificationError as e:
        print("specification error: %s" % e, file=sys.stderr)
        return EXIT_SPEC
    except (FileNotFoundError, IsADirectoryError) as e:
        print("cannot read %s" % e, file=sys.stderr)
        return EXIT_IO
    except ResourceLimit as e:
        print("inconclusive: %s" % e, file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
