import pytest

from l2sprophecy.corpus import corpus_names, load_corpus_entry
from l2sprophecy.l2s import ProphecySpec


@pytest.mark.parametrize("name", corpus_names())
def test_entry_loads(name):
    e = load_corpus_entry(name)
    assert e.name == name
    assert set(e.bounds) == set(e.system.vocab.sorts)
    assert e.maxlen > 0
    assert e.witness_system() is not None


def test_expected_table():
    assert {n: load_corpus_entry(n).ci for n in corpus_names()} == {
        "ticket": True, "abp": True, "toggle": True, "counter-loop": True, "tlb": False}
    e = load_corpus_entry("ticket")
    assert e.expected == {"without": "lasso-found", "with": "no-lasso-within-bound"}
    assert load_corpus_entry("toggle").invariant is not None


def test_entries_without_prophecy_get_an_empty_spec():
    e = load_corpus_entry("toggle")
    assert e.prophecy.counts(e.goal) == ProphecySpec().counts(e.goal) == (0, 0)


def test_unknown_entry():
    with pytest.raises(KeyError):
        load_corpus_entry("nope")
