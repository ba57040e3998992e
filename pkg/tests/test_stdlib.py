"""Derived constructors: catalog entries against their reference semantics."""
import random

import pytest

from helpers import AB, ABC, DE, HASH, mixed_list, sym_list
from listfn.stdlib import (
    CATALOG,
    catalog_term,
    comma,
    concat,
    filter_left,
    len_upto,
    list_to_pair,
    pair_to_list,
    windows,
)
from listfn.terms import TermTypeError, eval_term, infer_type
from listfn.types import (
    ListV,
    PairV,
    Sym,
    check_value,
    enumerate_values,
    random_value,
)

ENTRY_CASES = [(name, i) for name, e in CATALOG.items()
               for i in range(len(e.instances))]


@pytest.mark.parametrize("name,idx", ENTRY_CASES,
                         ids=[f"{n}-{i}" for n, i in ENTRY_CASES])
def test_catalog_entry_matches_oracle(name, idx):
    entry = CATALOG[name]
    args = entry.instances[idx]
    term = entry.build(*args)
    oracle = entry.oracle(*args)
    dom, cod = infer_type(term)
    for v in enumerate_values(dom, 6):
        got = eval_term(term, v)
        assert got == oracle(v), f"{name} on {v}"
        assert check_value(got, cod)
    rng = random.Random(idx + 1)
    for _ in range(200):
        v = random_value(dom, 25, rng)
        assert eval_term(term, v) == oracle(v)


def test_length_capped_at_bound():
    term = len_upto(2, AB)
    assert eval_term(term, sym_list("aba")) == Sym("2")
    assert eval_term(term, sym_list("ab")) == Sym("2")
    assert eval_term(term, sym_list("b")) == Sym("1")
    assert eval_term(term, sym_list("")) == Sym("0")


def test_filter_keeps_left_letters_in_order():
    term = filter_left(ABC, DE)
    v = mixed_list("acdebeda", "abc")
    assert eval_term(term, v) == sym_list("acba")


def test_comma_splits_on_right_letters():
    term = comma(ABC, HASH)
    v = mixed_list("ab#c##a###bc#", "abc")
    expected = ListV(tuple(
        sym_list(w) for w in ["ab", "c", "", "a", "", "", "bc", ""]))
    assert eval_term(term, v) == expected


def test_comma_without_separators_is_one_group():
    term = comma(ABC, HASH)
    assert eval_term(term, mixed_list("ba", "abc")) == ListV((sym_list("ba"),))
    assert eval_term(term, ListV(())) == ListV((sym_list(""),))


def test_list_to_pair_three_cases():
    term = list_to_pair(AB, Sym("a"))
    assert eval_term(term, sym_list("")) == PairV(Sym("a"), Sym("a"))
    assert eval_term(term, sym_list("b")) == PairV(Sym("b"), Sym("a"))
    assert eval_term(term, sym_list("bab")) == PairV(Sym("b"), Sym("a"))


def test_pair_to_list_and_concat():
    assert eval_term(pair_to_list(AB),
                     PairV(Sym("a"), Sym("b"))) == sym_list("ab")
    assert eval_term(concat(AB),
                     PairV(sym_list("ab"), sym_list("ba"))) == sym_list("abba")


def test_windows_slide_over_the_list():
    term = windows(2, AB)
    assert eval_term(term, sym_list("aba")) == ListV((
        PairV(Sym("a"), Sym("b")), PairV(Sym("b"), Sym("a"))))
    assert eval_term(term, sym_list("a")) == ListV(())
    assert eval_term(term, sym_list("")) == ListV(())


def test_catalog_term_builds_from_text():
    term = catalog_term("len_upto", ["2", "{a,b}"])
    assert eval_term(term, sym_list("aba")) == Sym("2")
    term = catalog_term("list_to_pair", ["{a,b}", "a"])
    assert eval_term(term, sym_list("")) == PairV(Sym("a"), Sym("a"))
    with pytest.raises(TermTypeError):
        catalog_term("no-such-entry", [])
    with pytest.raises(TermTypeError):
        catalog_term("len_upto", ["2"])
    with pytest.raises(TermTypeError):
        catalog_term("lift_plus", [])  # not text-constructible


def test_every_catalog_term_is_well_typed():
    for entry in CATALOG.values():
        for args in entry.instances:
            infer_type(entry.build(*args))
