"""Bundled models with their goals, prophecy, invariants and expected verdicts."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .l2s import InvariantFile, ProphecySpec, WitnessSystem, build_witness_system, parse_invariant, parse_prophecy
from .parser import Model, load_model, load_property
from .syntax import Formula

CORPUS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "models")

# name -> (bounds, maxlen, expected verdict without / with prophecy, checked in CI)
_TABLE = {
    "ticket": ({"thread": 2, "number": 5}, 40,
               {"without": "lasso-found", "with": "no-lasso-within-bound"}, True),
    "abp": ({"index": 2, "msg": 3}, 40,
            {"without": "lasso-found", "with": "no-lasso-within-bound"}, True),
    "toggle": ({"elem": 1}, 10,
               {"without": "no-lasso-within-bound", "invariant": "invariant-holds"}, True),
    "counter-loop": ({"num": 3}, 20,
                     {"without": "no-lasso-within-bound", "invariant": "invariant-holds"}, True),
    "tlb": ({"proc": 2, "entry": 2}, 20, {}, False),
}


@dataclass
class CorpusEntry:
    name: str
    model: Model
    goal: Formula
    prophecy: ProphecySpec
    invariant: Optional[InvariantFile]
    bounds: Dict[str, int]
    maxlen: int
    expected: Dict[str, str]
    ci: bool = True
    paths: Dict[str, str] = field(default_factory=dict)

    @property
    def system(self):
        return self.model.system

    @property
    def hooks(self) -> Dict[str, str]:
        return self.model.hooks

    def witness_system(self, with_prophecy: bool = True) -> WitnessSystem:
        spec = self.prophecy if with_prophecy else ProphecySpec()
        return build_witness_system(self.system, self.goal, spec)


def corpus_names() -> List[str]:
    return list(_TABLE)


def corpus_path(name: str, kind: str) -> Optional[str]:
    p = os.path.join(CORPUS_DIR, "%s.%s" % (name, kind))
    return p if os.path.exists(p) else None


def _read(p: str) -> str:
    with open(p) as fh:
        return fh.read()


def load_corpus_entry(name: str) -> CorpusEntry:
    if name not in _TABLE:
        raise KeyError("unknown corpus entry %r (have: %s)" % (name, ", ".join(_TABLE)))
    bounds, maxlen, expected, ci = _TABLE[name]
    paths = {k: corpus_path(name, k) for k in ("model", "property", "prophecy", "invariant")}
    paths = {k: v for k, v in paths.items() if v}
    model = load_model(_read(paths["model"]), paths["model"])
    goal = load_property(_read(paths["property"]), model.vocab, paths["property"])
    spec = ProphecySpec()
    if "prophecy" in paths:
        spec = parse_prophecy(_read(paths["prophecy"]), model.vocab, paths["prophecy"])
    inv = None
    if "invariant" in paths:
        inv = parse_invariant(_read(paths["invariant"]), model.vocab, paths["invariant"])
    return CorpusEntry(name, model, goal, spec, inv, dict(bounds), maxlen, dict(expected), ci, paths)
