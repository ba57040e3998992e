"""Formulas, word and parse-tree structures, and transductions."""
import itertools
import random

import pytest

from helpers import AB, DEEP_MIX_TYPE, sym_list
from listfn.logic import (
    Structure,
    apply_transduction,
    builtin_fot,
    builtin_names,
    builtin_term,
    check_commutes,
    copy_k,
    decode_structure,
    decode_word_structure,
    derived_next_sibling,
    encode_value,
    encoding_vocabulary,
    eval_formula,
    fot_ab_example,
    free_vars,
    parse_formula,
    render_formula,
    sat_rows,
    word_structure,
)
from listfn.terms import eval_term, infer_type
from listfn.types import (
    FinSet,
    List,
    enumerate_values,
    parse_value,
    random_value,
)

FORMULAS = [
    "Q_a(x)",
    "E x. Q_a(x)",
    "A x. Q_a(x) | Q_b(x)",
    "E x. A y. (x = y | lt(x,y))",
    "E x. (Q_a(x) & !Q_b(x))",
    "A x. (Q_a(x) -> E y. (S(x,y) & Q_b(y)))",
    "(E x. Q_a(x)) <-> !(A x. Q_b(x))",
    "E x. E y. x != y",
]


@pytest.mark.parametrize("text", FORMULAS)
def test_formula_text_round_trip(text):
    f = parse_formula(text)
    assert parse_formula(render_formula(f)) == f


def test_free_vars():
    assert free_vars(parse_formula("Q_a(x)")) == {"x"}
    assert free_vars(parse_formula("E x. lt(x,y)")) == {"y"}
    assert free_vars(parse_formula("E x. Q_a(x)")) == set()


def test_word_structures_decode_back():
    for n in range(0, 6):
        for tup in itertools.product("ab", repeat=n):
            w = "".join(tup)
            assert decode_word_structure(word_structure(w)) == w


def test_eval_formula_on_word_structures():
    s = word_structure("ab")
    assert eval_formula(s, parse_formula("E x. Q_a(x)"), {})
    assert not eval_formula(s, parse_formula("A x. Q_a(x)"), {})
    assert eval_formula(s, parse_formula(
        "E x. E y. (S(x,y) & Q_a(x) & Q_b(y))"), {})
    assert eval_formula(s, parse_formula("lt(x,y)"), {"x": 0, "y": 1})
    assert not eval_formula(s, parse_formula("lt(x,y)"), {"x": 1, "y": 0})


@pytest.mark.parametrize("text", FORMULAS)
def test_sat_rows_agrees_with_pointwise_evaluation(text):
    f = parse_formula(text)
    wanted = tuple(sorted(free_vars(f)))
    for w in ["", "a", "ab", "bba", "abab"]:
        s = word_structure(w)
        rows = sat_rows(s, f, wanted)
        brute = {
            tup for tup in itertools.product(s.universe, repeat=len(wanted))
            if eval_formula(s, f, dict(zip(wanted, tup)))}
        assert rows == brute, (text, w)


def test_copy_k_duplicates_the_universe():
    s = word_structure("aba")
    ck = copy_k(s, 3)
    assert len(ck.universe) == 3 * len(s.universe)
    for i in (1, 2, 3):
        assert f"copy{i}" in ck.vocabulary
    assert len(ck.relations["copy1"]) == len(s.universe)


def _sorted_ab(word):
    return "a" * word.count("a") + "b" * word.count("b")


def test_ab_example_sorts_the_letters():
    t = fot_ab_example()
    out = apply_transduction(t, word_structure("ababa"))
    assert decode_word_structure(out) == "aaabb"
    for n in range(0, 6):
        for tup in itertools.product("ab", repeat=n):
            w = "".join(tup)
            got = decode_word_structure(apply_transduction(t, word_structure(w)))
            assert got == _sorted_ab(w), w


def test_structure_round_trip_on_panel():
    for t in [List(AB), DEEP_MIX_TYPE, List(List(AB))]:
        for v in enumerate_values(t, 6):
            s = encode_value(v, t)
            assert set(s.vocabulary) == set(encoding_vocabulary(t))
            assert decode_structure(s, t) == v


def test_decode_rejects_corrupt_structures():
    from listfn.types import EncodingError
    t = List(AB)
    s = encode_value(sym_list("ab"), t)
    # drop the letter tag from one leaf
    broken = Structure(
        s.universe, s.vocabulary,
        {**s.relations,
         "t_0__a": frozenset(), "t_0__b": frozenset({(2,)})})
    with pytest.raises(EncodingError):
        decode_structure(broken, t)


def test_next_sibling_is_the_order_successor():
    t = List(AB)
    s = encode_value(sym_list("abab"), t)
    nxt = sorted(derived_next_sibling(s))
    assert nxt == [(1, 2), (2, 3), (3, 4)]


def test_builtin_catalog_is_complete():
    names = builtin_names()
    assert set(names) == {
        "reverse", "append", "coappend", "flat", "block", "ab_example"}
    assert names["block"] == 2
    assert names["ab_example"] == 0


@pytest.mark.parametrize("name,types", [
    ("reverse", (AB,)),
    ("append", (AB,)),
    ("coappend", (AB,)),
    ("flat", (AB,)),
    ("block", (AB, FinSet(("c", "d")))),
])
def test_builtins_commute_with_their_terms(name, types):
    term = builtin_term(name, *types)
    fot = builtin_fot(name, *types)
    dom, cod = infer_type(term)
    samples = list(enumerate_values(dom, 4))
    rng = random.Random(13)
    samples += [random_value(dom, 14, rng) for _ in range(60)]
    report = check_commutes(term, fot, samples)
    assert report.ok, report.summary()
    assert report.total == len(samples)


def test_coappend_transduction_point_value():
    S5 = FinSet(("a", "b", "c", "d", "e"))
    t_in = List(List(S5))
    term = builtin_term("coappend", List(S5))
    fot = builtin_fot("coappend", List(S5))
    v = parse_value("[[a,b],[c,d],[e]]", t_in)
    cod = infer_type(term)[1]
    got = decode_structure(apply_transduction(fot, encode_value(v, t_in)), cod)
    assert got == eval_term(term, v)
    assert got == parse_value("inl ([a,b],[[c,d],[e]])", cod)


def test_block_transduction_point_value():
    S, G = AB, FinSet(("c", "d"))
    term = builtin_term("block", S, G)
    fot = builtin_fot("block", S, G)
    dom, cod = infer_type(term)
    v = parse_value("[inl a,inl b,inr c,inr d,inl b,inr c]", dom)
    got = decode_structure(apply_transduction(fot, encode_value(v, dom)), cod)
    assert got == eval_term(term, v)
    assert got == parse_value("[inl [a,b],inr [c,d],inl [b],inr [c]]", cod)


def test_check_commutes_reports_failures():
    from listfn.terms import Compose, Reverse
    term = Compose(Reverse(AB), Reverse(AB))  # identity, not reverse
    fot = builtin_fot("reverse", AB)
    samples = list(enumerate_values(List(AB), 4))
    report = check_commutes(term, fot, samples)
    assert not report.ok
    assert report.failures
    assert report.total == len(samples)
