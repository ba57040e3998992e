"""Concrete term syntax: parse/render round trips and error reporting."""
import pytest

from helpers import AB, BASICS, CD
from listfn.samples import SAMPLE_GROUPS
from listfn.stdlib import comma, filter_left, len_upto, list_to_pair
from listfn.syntax import parse_term, render_term
from listfn.terms import (
    Compose,
    Map,
    PrefixGroupMult,
    Reverse,
    eval_term,
    infer_type,
)
from listfn.types import FinSet, ParseError, Sym, enumerate_values

ROUND_TRIP_TERMS = (
    [t for _, t, _ in BASICS]
    + [
        Map(Map(Reverse(AB))),
        Compose(filter_left(AB, CD), parse_term("block@{a,b},{c,d}")),
        len_upto(3, AB),
        comma(AB, FinSet(("#",))),
        list_to_pair(AB, Sym("a")),
        PrefixGroupMult(SAMPLE_GROUPS["z2"]),
        PrefixGroupMult(SAMPLE_GROUPS["z3"]),
    ]
)


@pytest.mark.parametrize("term", ROUND_TRIP_TERMS,
                         ids=[str(i) for i in range(len(ROUND_TRIP_TERMS))])
def test_term_text_round_trip(term):
    text = render_term(term)
    back = parse_term(text)
    assert back == term
    # rendered text is stable
    assert render_term(back) == text


def test_round_trip_preserves_semantics():
    term = comma(AB, FinSet(("#",)))
    back = parse_term(render_term(term))
    dom, _ = infer_type(term)
    for v in enumerate_values(dom, 6):
        assert eval_term(back, v) == eval_term(term, v)


def test_parse_accepts_multiline_text():
    text = """(compose
                 reverse@{a,b}
                 reverse@{a,b})"""
    assert parse_term(text) == Compose(Reverse(AB), Reverse(AB))


def test_parse_reports_errors():
    with pytest.raises(ParseError):
        parse_term("(compose reverse@{a,b}")  # unbalanced
    with pytest.raises(ParseError):
        parse_term("(frobnicate reverse@{a,b})")  # unknown head
    with pytest.raises(ParseError):
        parse_term("(gprefix z99)")  # unknown group name
    with pytest.raises(ParseError):
        parse_term("")


def test_custom_group_table():
    groups = {"swap": SAMPLE_GROUPS["z2"]}
    term = parse_term("(gprefix swap)", groups=groups)
    assert term == PrefixGroupMult(SAMPLE_GROUPS["z2"])
    with pytest.raises(ParseError):
        parse_term("(gprefix z2)", groups=groups)
