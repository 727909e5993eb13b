import pytest

from l2sprophecy.checker import export_vcs
from l2sprophecy.corpus import load_corpus_entry
from l2sprophecy.l2s import build_monitor, build_witness_system, mine_prophecy, resolve_invariant
from l2sprophecy.smt import Names, script
from l2sprophecy.parser import load_model, parse_formula


def test_names_injective():
    n = Names()
    names = ["a", "a'", "l2s_w1.<p(V1)>", "and", "x|y", "x/y", "S_s", "a"]
    out = [n(x) for x in names]
    assert out[0] == out[-1] == "a"
    assert len(set(out[:-1])) == len(names) - 1
    assert n("and").startswith("|")


def test_script_shape():
    m = load_model("(sort s)(relation le s s)(interpret le (order s))(relation p s)(constant c s)")
    text = script(m.vocab, [parse_formula("(and (p c) (le c c))", m.vocab)], "hello")
    lines = text.splitlines()
    assert lines[0] == "; hello"
    assert "(declare-sort S_s 0)" in lines
    assert "(declare-fun p (S_s) Bool)" in lines
    assert "(declare-fun c () S_s)" in lines
    assert "(assert (and (p c) (le c c)))" in lines
    assert lines[-1] == "(check-sat)"
    # the order is axiomatised
    assert sum(l.startswith("(assert") for l in lines) > 2


def _vcs(name, drop=None):
    e = load_corpus_entry(name)
    spec = mine_prophecy(e.invariant, e.goal)
    mon = build_monitor(build_witness_system(e.system, e.goal, spec), hooks=e.hooks)
    conjs = resolve_invariant(e.invariant, mon)
    if drop is not None:
        conjs = conjs[:drop] + conjs[drop + 1:]
    return export_vcs(mon, conjs), len(conjs)


def _z3(text):
    z3 = pytest.importorskip("z3")
    s = z3.Solver()
    s.set("timeout", 60000)
    s.from_string(text)
    return str(s.check())


@pytest.mark.parametrize("name", ["toggle", "counter-loop"])
def test_full_invariant_vcs_unsat(name):
    files, _ = _vcs(name)
    assert {fn: _z3(t) for fn, t in files.items()} == {fn: "unsat" for fn in files}


def test_toggle_weakened_invariants_fail_somewhere():
    _, n = _vcs("toggle")
    for k in range(n):
        files, _ = _vcs("toggle", drop=k)
        assert "sat" in {_z3(t) for t in files.values()}
